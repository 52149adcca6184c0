#include "owd/models.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "owd/errors.hpp"
#include "owd/topology.hpp"

namespace owd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularEnergy = 1e-12;
constexpr int kCheckNodes = 1025;

void check_l(int l) {
  if (l < -1 || l > 1)
    throw std::invalid_argument("correlator index l must be -1, 0 or 1");
}

[[noreturn]] void singular(const char* model, double phi, double omega) {
  std::ostringstream msg;
  msg << model << ": quasiparticle energy " << omega << " at phi = " << phi
      << " (exact critical point)";
  throw SingularIntegrand(msg.str());
}

// Scans ω on a uniform grid that includes both endpoints, where the ζ = ±1
// gap closings sit, and returns quadrature breakpoints graded geometrically
// toward every local minimum of ω. Near-gap features have width ~ω_min, far
// below what a coarse panel can see, so the grading goes down to that scale.
template <class Energy>
std::vector<double> breakpoints(const char* model, const Energy& omega,
                                bool must_be_gapped) {
  std::array<double, kCheckNodes> w;
  const double step = kPi / (kCheckNodes - 1);
  for (int i = 0; i < kCheckNodes; ++i) {
    w[i] = omega(i * step);
    if (must_be_gapped && w[i] < kSingularEnergy) singular(model, i * step, w[i]);
  }

  std::vector<double> points{0.0, kPi};
  for (int i = 0; i < kCheckNodes; ++i) {
    const bool left_ok = i == 0 || w[i] <= w[i - 1];
    const bool right_ok = i + 1 == kCheckNodes || w[i] <= w[i + 1];
    if (!left_ok || !right_ok) continue;
    std::uintmax_t iters = 100;
    const auto [m, wm] = boost::math::tools::brent_find_minima(
        omega, std::max(0.0, (i - 1) * step), std::min(kPi, (i + 1) * step),
        std::numeric_limits<double>::digits / 2, iters);
    const double floor = std::max(std::min(wm, w[i]), kSingularEnergy);
    points.push_back(m);
    for (double d = kPi / 2; d > floor / 4; d /= 2) {
      if (m - d > 0.0) points.push_back(m - d);
      if (m + d < kPi) points.push_back(m + d);
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end(),
                           [](double a, double b) { return b - a < 1e-15; }),
               points.end());
  points.back() = kPi;
  return points;
}

XState state_from_correlators(double g0, double g1, double gm1) {
  XState s{g0, g0, gm1, g1, g0 * g0 - g1 * gm1};
  eigenvalues(s);  // throws NonPhysicalState
  return s;
}

}  // namespace

double xy_energy(const XYParams& p, double phi) {
  const double y = p.gamma * std::sin(phi);
  const double z = p.h + std::cos(phi);
  return std::hypot(y, z);
}

double xy_correlator(const XYParams& p, int l, const QuadratureOptions& quad) {
  check_l(l);
  const auto points = breakpoints(
      "XY chain", [&](double phi) { return xy_energy(p, phi); }, true);
  auto integrand = [&](double phi) {
    const double w = xy_energy(p, phi);
    if (w < kSingularEnergy) singular("XY chain", phi, w);
    return -(std::cos(l * phi) * (p.h + std::cos(phi)) -
             p.gamma * std::sin(l * phi) * std::sin(phi)) /
           (kPi * w);
  };
  return integrate(integrand, std::span<const double>(points), quad).value;
}

XState xy_state(const XYParams& p, const QuadratureOptions& quad) {
  return state_from_correlators(xy_correlator(p, 0, quad),
                                xy_correlator(p, 1, quad),
                                xy_correlator(p, -1, quad));
}

double ext_ising_angle(const ExtIsingParams& p, double phi) {
  const auto r = winding_vector(p, phi);
  return std::atan2(r.y, r.z);
}

double ext_ising_integrand(const ExtIsingParams& p, int l, double phi) {
  const auto r = winding_vector(p, phi);
  const double w = std::hypot(r.y, r.z);
  if (p.beta.is_infinite() && w < kSingularEnergy)
    singular("extended Ising chain", phi, w);
  return -p.beta.occupation_factor(w) *
         std::cos(l * phi - std::atan2(r.y, r.z)) / kPi;
}

double ext_ising_correlator(const ExtIsingParams& p, int l,
                            const QuadratureOptions& quad) {
  check_l(l);
  const auto points =
      breakpoints("extended Ising chain",
                  [&](double phi) { return energy(p, phi); },
                  p.beta.is_infinite());
  return integrate([&](double phi) { return ext_ising_integrand(p, l, phi); },
                   std::span<const double>(points), quad)
      .value;
}

XState ext_ising_state(const ExtIsingParams& p,
                       const QuadratureOptions& quad) {
  return state_from_correlators(ext_ising_correlator(p, 0, quad),
                                ext_ising_correlator(p, 1, quad),
                                ext_ising_correlator(p, -1, quad));
}

}  // namespace owd
