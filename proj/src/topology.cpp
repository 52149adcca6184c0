#include "owd/topology.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "owd/errors.hpp"

namespace owd {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kGapScan = 8192;
constexpr double kGapClosed = 1e-8;
constexpr double kRootResidual = 1e-10;
constexpr double kDedup = 1e-8;

using Coeffs = std::array<double, 5>;

std::complex<double> on_circle(const Coeffs& a, double theta) {
  double re = 0.0;
  double im = 0.0;
  for (int k = -2; k <= 2; ++k) {
    re += a[k + 2] * std::cos(k * theta);
    im += a[k + 2] * std::sin(k * theta);
  }
  return {re, im};
}

// g = A + p B for the free parameter p; B = dg/dp.
Coeffs free_direction(const ExtIsingParams& p, FreeParameter free) {
  switch (free) {
    case FreeParameter::h:
      return {0.0, 0.0, -1.0, 0.0, 0.0};
    case FreeParameter::lambda:
      return {(1.0 - p.delta) / 2.0, 0.0, 0.0, 0.0, (1.0 + p.delta) / 2.0};
    case FreeParameter::gamma:
      return {0.0, -0.5, 0.0, 0.5, 0.0};
  }
  throw std::invalid_argument("unknown free parameter");
}

ExtIsingParams with_free_zeroed(ExtIsingParams p, FreeParameter free) {
  switch (free) {
    case FreeParameter::h:
      p.h = 0.0;
      break;
    case FreeParameter::lambda:
      p.lambda = 0.0;
      break;
    case FreeParameter::gamma:
      p.gamma = 0.0;
      break;
  }
  return p;
}

}  // namespace

WindingPoint winding_vector(const ExtIsingParams& p, double phi) {
  return {p.lambda * p.delta * std::sin(2.0 * phi) + p.gamma * std::sin(phi),
          p.lambda * std::cos(2.0 * phi) + std::cos(phi) - p.h};
}

WindingPoint winding_vector_derivative(const ExtIsingParams& p, double phi) {
  return {2.0 * p.lambda * p.delta * std::cos(2.0 * phi) +
              p.gamma * std::cos(phi),
          -2.0 * p.lambda * std::sin(2.0 * phi) - std::sin(phi)};
}

double energy(const ExtIsingParams& p, double phi) {
  const auto r = winding_vector(p, phi);
  return std::hypot(r.y, r.z);
}

GapMinimum minimum_energy(const ExtIsingParams& p) {
  std::vector<double> omega(kGapScan);
  const double step = 2.0 * kPi / kGapScan;
  for (int i = 0; i < kGapScan; ++i) omega[i] = energy(p, -kPi + i * step);

  auto squared = [&](double phi) {
    const auto r = winding_vector(p, phi);
    return r.y * r.y + r.z * r.z;
  };
  auto slope = [&](double phi) {
    const auto r = winding_vector(p, phi);
    const auto d = winding_vector_derivative(p, phi);
    return r.y * d.y + r.z * d.z;
  };
  GapMinimum best{-kPi, omega[0]};
  for (int i = 0; i < kGapScan; ++i) {
    const double prev = omega[(i + kGapScan - 1) % kGapScan];
    const double next = omega[(i + 1) % kGapScan];
    if (omega[i] > prev || omega[i] > next) continue;
    const double phi = -kPi + i * step;
    std::uintmax_t iters = 200;
    const auto [x, fx] = boost::math::tools::brent_find_minima(
        squared, phi - step, phi + step,
        std::numeric_limits<double>::digits / 2, iters);
    // Brent only pins the minimum to ~sqrt(eps); polish on the zero of
    // d(ω²)/dφ so a closing gap reads as ~1e-16, not ~1e-8.
    double at = x;
    const double lo = x - step;
    const double hi = x + step;
    const double slo = slope(lo);
    const double shi = slope(hi);
    if (slo < 0.0 && shi > 0.0) {
      std::uintmax_t root_iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          slope, lo, hi, slo, shi, boost::math::tools::eps_tolerance<double>(),
          root_iters);
      at = 0.5 * (bracket.first + bracket.second);
    }
    double w = energy(p, at);
    if (!(w <= std::sqrt(std::max(fx, 0.0)))) {
      at = x;
      w = std::sqrt(std::max(fx, 0.0));
    }
    if (w < best.omega) best = {std::remainder(at, 2.0 * kPi), w};
    if (omega[i] < best.omega) best = {phi, omega[i]};
  }
  return best;
}

double winding_integral(const ExtIsingParams& p, int nodes) {
  if (nodes < 8) throw std::invalid_argument("winding integral needs >= 8 nodes");
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double phi = -kPi + 2.0 * kPi * i / nodes;
    const auto r = winding_vector(p, phi);
    const auto d = winding_vector_derivative(p, phi);
    sum += (r.y * d.z - r.z * d.y) / (r.y * r.y + r.z * r.z);
  }
  // (1/2π) × (2π/N) Σ f
  return sum / nodes;
}

int winding_number(const ExtIsingParams& p, int nodes) {
  const auto gap = minimum_energy(p);
  if (gap.omega < kGapClosed) {
    std::ostringstream msg;
    msg << "winding vector passes within " << gap.omega
        << " of the origin at phi = " << gap.phi;
    throw GapClosed(msg.str());
  }
  const double raw = winding_integral(p, nodes);
  const double nu = std::round(raw);
  if (std::abs(raw - nu) >= 0.01) {
    std::ostringstream msg;
    msg << "winding integral " << raw << " is not close to an integer";
    throw ConvergenceFailure(msg.str());
  }
  return static_cast<int>(nu);
}

SpectrumSeries spectrum(const ExtIsingParams& p, int L) {
  if (L < 2) throw std::invalid_argument("spectrum needs L >= 2");
  SpectrumSeries out;
  out.reserve(static_cast<std::size_t>(L));
  for (int k = 0; k < L; ++k) {
    // m = k - (L-1)/2, so 2πm/L = π(2k - L + 1)/L.
    const double phi = kPi * (2.0 * k - L + 1.0) / L;
    const double w = energy(p, phi);
    out.push_back({phi, w, -w});
  }
  return out;
}

CharacteristicPolynomial CharacteristicPolynomial::from(
    const ExtIsingParams& p) {
  return {{p.lambda * (1.0 - p.delta) / 2.0, (1.0 - p.gamma) / 2.0, -p.h,
           (1.0 + p.gamma) / 2.0, p.lambda * (1.0 + p.delta) / 2.0}};
}

std::complex<double> CharacteristicPolynomial::operator()(
    std::complex<double> zeta) const {
  std::complex<double> sum = 0.0;
  for (int k = -2; k <= 2; ++k) sum += coeffs[k + 2] * std::pow(zeta, k);
  return sum;
}

std::vector<CriticalPoint> characteristic_roots(const ExtIsingParams& params,
                                                FreeParameter free,
                                                int samples) {
  if (samples < 3) throw std::invalid_argument("need at least 3 samples");
  const Coeffs a = CharacteristicPolynomial::from(with_free_zeroed(params, free))
                       .coeffs;
  const Coeffs b = free_direction(params, free);
  if (std::all_of(b.begin(), b.end(), [](double c) { return c == 0.0; }))
    throw NoRoots("characteristic function does not depend on the free parameter");

  // Real and imaginary parts of A + pB vanish together iff the cross
  // product of A and B vanishes.
  auto cross = [&](double theta) {
    const auto ga = on_circle(a, theta);
    const auto gb = on_circle(b, theta);
    return ga.real() * gb.imag() - ga.imag() * gb.real();
  };

  std::vector<double> theta(samples);
  std::vector<double> d(samples);
  for (int i = 0; i < samples; ++i) {
    theta[i] = kPi * i / (samples - 1);
    d[i] = cross(theta[i]);
  }

  std::vector<double> candidates;
  for (int i = 0; i < samples; ++i) {
    if (std::abs(d[i]) < kRootResidual) candidates.push_back(theta[i]);
    if (i + 1 < samples && d[i] * d[i + 1] < 0.0) {
      std::uintmax_t iters = 200;
      const auto bracket = boost::math::tools::toms748_solve(
          cross, theta[i], theta[i + 1], d[i], d[i + 1],
          boost::math::tools::eps_tolerance<double>(), iters);
      candidates.push_back(0.5 * (bracket.first + bracket.second));
    }
    // Tangential zeros do not change sign; refine local minima of |D|.
    if (i > 0 && i + 1 < samples && std::abs(d[i]) <= std::abs(d[i - 1]) &&
        std::abs(d[i]) <= std::abs(d[i + 1]) && d[i - 1] * d[i + 1] > 0.0) {
      std::uintmax_t iters = 200;
      const auto [x, fx] = boost::math::tools::brent_find_minima(
          [&](double t) { return std::abs(cross(t)); }, theta[i - 1],
          theta[i + 1], std::numeric_limits<double>::digits / 2, iters);
      (void)fx;
      candidates.push_back(x);
    }
  }

  std::vector<CriticalPoint> roots;
  int degenerate = 0;
  for (double t : candidates) {
    const auto ga = on_circle(a, t);
    const auto gb = on_circle(b, t);
    const double nb = std::abs(gb);
    if (nb < 1e-8) {
      if (std::abs(ga) < 1e-8) ++degenerate;
      continue;
    }
    if (std::abs(cross(t)) / nb >= kRootResidual) continue;
    const double value = -(ga.real() * gb.real() + ga.imag() * gb.imag()) /
                         (nb * nb);
    roots.push_back({value, std::polar(1.0, t)});
  }

  const auto flat = std::count_if(d.begin(), d.end(), [&](double v) {
    return std::abs(v) < kRootResidual;
  });
  if (flat == samples || degenerate > 0)
    throw NoRoots(
        "characteristic function vanishes on a continuum of the unit circle");

  std::sort(roots.begin(), roots.end(), [](const auto& l, const auto& r) {
    return l.value < r.value;
  });
  std::vector<CriticalPoint> unique;
  for (const auto& r : roots) {
    if (unique.empty() || r.value - unique.back().value > kDedup)
      unique.push_back(r);
  }
  return unique;
}

}  // namespace owd
