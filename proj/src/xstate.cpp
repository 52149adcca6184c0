#include "owd/xstate.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "owd/errors.hpp"

namespace owd {
namespace {

constexpr double kNegativeTolerance = 1e-10;

Spectrum4 sorted_checked(std::array<double, 4> p, const char* what) {
  std::sort(p.begin(), p.end(), std::greater<>());
  if (p[3] < -kNegativeTolerance) {
    std::ostringstream msg;
    msg << what << ": negative probability " << p[3];
    throw NonPhysicalState(msg.str());
  }
  return Spectrum4{p};
}

void silence_gsl() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

struct SimplexDeleter {
  void operator()(gsl_multimin_fminimizer* s) const {
    gsl_multimin_fminimizer_free(s);
  }
};

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

using SimplexPtr = std::unique_ptr<gsl_multimin_fminimizer, SimplexDeleter>;
using VectorPtr = std::unique_ptr<gsl_vector, VectorDeleter>;

double angle_objective(const gsl_vector* x, void* params) {
  const auto& state = *static_cast<const XState*>(params);
  return measured_entropy(
      state, MeasurementDirection::from_angles(gsl_vector_get(x, 0),
                                               gsl_vector_get(x, 1)));
}

struct AngleMin {
  double theta;
  double phi;
  double value;
};

// Nelder-Mead over (theta, phi). The angles are left unconstrained: every
// real pair maps onto the sphere and the objective is symmetric under the
// reflections that fold it back into the octant.
AngleMin refine(const XState& state, AngleMin seed, double step,
                const MinimizerOptions& opts) {
  silence_gsl();
  SimplexPtr s(gsl_multimin_fminimizer_alloc(
      gsl_multimin_fminimizer_nmsimplex2, 2));
  VectorPtr x(gsl_vector_alloc(2));
  VectorPtr steps(gsl_vector_alloc(2));
  gsl_vector_set(x.get(), 0, seed.theta);
  gsl_vector_set(x.get(), 1, seed.phi);
  gsl_vector_set_all(steps.get(), step);

  gsl_multimin_function fn;
  fn.n = 2;
  fn.f = &angle_objective;
  fn.params = const_cast<XState*>(&state);
  gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), steps.get());

  const double size_tol = 1e-3 * std::sqrt(opts.tolerance);
  for (int it = 0; it < opts.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()),
                               size_tol) == GSL_SUCCESS)
      break;
  }
  const gsl_vector* best = gsl_multimin_fminimizer_x(s.get());
  return {gsl_vector_get(best, 0), gsl_vector_get(best, 1),
          gsl_multimin_fminimizer_minimum(s.get())};
}

MeasurementDirection folded(double theta, double phi) {
  const auto d = MeasurementDirection::from_angles(theta, phi);
  return MeasurementDirection::from_angles(
      std::acos(std::min(1.0, std::abs(d.z3()))),
      std::atan2(std::abs(d.z2()), std::abs(d.z1())));
}

}  // namespace

MeasurementDirection::MeasurementDirection(double z1, double z2, double z3)
    : z1_(z1), z2_(z2), z3_(z3) {
  const double norm2 = z1 * z1 + z2 * z2 + z3 * z3;
  if (!(std::abs(norm2 - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg << "measurement direction is not a unit vector (|z|^2 = " << norm2
        << ")";
    throw std::invalid_argument(msg.str());
  }
}

MeasurementDirection MeasurementDirection::from_angles(double theta,
                                                       double phi) {
  const double st = std::sin(theta);
  return {st * std::cos(phi), st * std::sin(phi), std::cos(theta)};
}

Spectrum4 eigenvalues(const XState& x) {
  // Inner {01,10} and outer {00,11} blocks; with r = s these reduce to
  // |c1 + c2| and sqrt((2r)² + (c1 - c2)²).
  const double a = std::hypot(x.r - x.s, x.c1 + x.c2);
  const double b = std::hypot(x.r + x.s, x.c1 - x.c2);
  return sorted_checked({(1.0 - x.c3 + a) / 4.0, (1.0 - x.c3 - a) / 4.0,
                         (1.0 + x.c3 + b) / 4.0, (1.0 + x.c3 - b) / 4.0},
                        "X state eigenvalues");
}

double entropy(const Spectrum4& spectrum) {
  double h = 0.0;
  for (double p : spectrum.p) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

Spectrum4 post_measurement_spectrum(const XState& x,
                                    const MeasurementDirection& dir) {
  const double transverse =
      x.c1 * x.c1 * dir.z1() * dir.z1() + x.c2 * x.c2 * dir.z2() * dir.z2();
  const double minus = x.r - x.c3 * dir.z3();
  const double plus = x.r + x.c3 * dir.z3();
  const double a = std::sqrt(minus * minus + transverse);
  const double b = std::sqrt(plus * plus + transverse);
  const double sz = x.s * dir.z3();
  return sorted_checked({(1.0 - sz + a) / 4.0, (1.0 - sz - a) / 4.0,
                         (1.0 + sz + b) / 4.0, (1.0 + sz - b) / 4.0},
                        "post-measurement spectrum");
}

double measured_entropy(const XState& state, const MeasurementDirection& dir) {
  return entropy(post_measurement_spectrum(state, dir));
}

DeficitResult one_way_deficit(const XState& state,
                              const MinimizerOptions& opts) {
  if (opts.grid < 2 || !(opts.tolerance > 0.0))
    throw std::invalid_argument("minimizer needs grid >= 2 and tolerance > 0");

  const double base = entropy(eigenvalues(state));
  if (state == XState{}) return {0.0, MeasurementDirection(0.0, 0.0, 1.0)};

  const double step = (std::numbers::pi / 2.0) / (opts.grid - 1);
  AngleMin best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < opts.grid; ++i) {
    for (int j = 0; j < opts.grid; ++j) {
      const double theta = i * step;
      const double phi = j * step;
      const double v =
          measured_entropy(state, MeasurementDirection::from_angles(theta, phi));
      if (v < best.value) best = {theta, phi, v};
    }
  }
  if (opts.warm_start) {
    const auto& w = *opts.warm_start;
    const double theta = std::acos(std::clamp(w.z3(), -1.0, 1.0));
    const double phi = std::atan2(w.z2(), w.z1());
    const double v = measured_entropy(state, w);
    if (v < best.value) best = {theta, phi, v};
  }

  const AngleMin refined = refine(state, best, step, opts);
  if (!std::isfinite(refined.value) ||
      refined.value > best.value + 100.0 * opts.tolerance) {
    std::ostringstream msg;
    msg << "simplex refinement (" << refined.value
        << ") disagrees with grid minimum (" << best.value << ")";
    throw ConvergenceFailure(msg.str());
  }
  if (refined.value < best.value) best = refined;

  double deficit = best.value - base;
  if (deficit < 0.0) {
    if (deficit < -1e-9) {
      std::ostringstream msg;
      msg << "negative deficit " << deficit;
      throw ConvergenceFailure(msg.str());
    }
    deficit = 0.0;
  }
  return {deficit, folded(best.theta, best.phi)};
}

}  // namespace owd
