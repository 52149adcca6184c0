#pragma once

#include <array>
#include <complex>
#include <vector>

#include "owd/models.hpp"

namespace owd {

/// Point (Y, Z) of the winding vector r(φ) = (0, Y, Z):
///   Y(φ) = λδ sin 2φ + γ sin φ,   Z(φ) = λ cos 2φ + cos φ - h.
struct WindingPoint {
  double y;
  double z;
};

WindingPoint winding_vector(const ExtIsingParams& params, double phi);

/// dY/dφ and dZ/dφ in closed form.
WindingPoint winding_vector_derivative(const ExtIsingParams& params,
                                       double phi);

/// ω_φ = sqrt(Y² + Z²).
double energy(const ExtIsingParams& params, double phi);

struct GapMinimum {
  double phi;
  double omega;
};

/// Minimum of ω_φ over continuous φ ∈ [-π, π]: dense scan followed by Brent
/// refinement of every local minimum on the scan.
GapMinimum minimum_energy(const ExtIsingParams& params);

/// Raw value of ν = (1/2π) ∮ (Y dZ - Z dY) / |r|², trapezoidal rule on
/// `nodes` uniform points of the periodic interval with analytic derivatives.
double winding_integral(const ExtIsingParams& params, int nodes = 4096);

/// Integer winding number. Throws GapClosed if the loop passes within 1e-8
/// of the origin, ConvergenceFailure if the raw integral is not within 0.01
/// of an integer.
int winding_number(const ExtIsingParams& params, int nodes = 4096);

struct SpectrumPoint {
  double phi;
  double omega_plus;
  double omega_minus;
};

using SpectrumSeries = std::vector<SpectrumPoint>;

/// BdG energies at the L wavevectors φ = 2πm/L, m = -(L-1)/2, ..., (L-1)/2.
SpectrumSeries spectrum(const ExtIsingParams& params, int L);

/// Laurent polynomial g(ζ) = Σ_{k=-2}^{2} a_k ζ^k with g(e^{iφ}) = Z + iY.
struct CharacteristicPolynomial {
  /// Coefficients of ζ^-2, ζ^-1, ζ^0, ζ^1, ζ^2.
  std::array<double, 5> coeffs{};

  static CharacteristicPolynomial from(const ExtIsingParams& params);

  std::complex<double> operator()(std::complex<double> zeta) const;
};

enum class FreeParameter { h, lambda, gamma };

struct CriticalPoint {
  double value;
  /// Unit-circle zero of g in the closed upper half plane; its conjugate is
  /// also a zero.
  std::complex<double> zeta;
};

/// Values of the free parameter for which g has a zero on |ζ| = 1, sorted
/// ascending and deduplicated within 1e-8. Throws NoRoots when g does not
/// single out isolated values (the free parameter drops out, or every point
/// of the circle is a zero for some value).
std::vector<CriticalPoint> characteristic_roots(const ExtIsingParams& params,
                                                FreeParameter free,
                                                int samples = 10000);

}  // namespace owd
