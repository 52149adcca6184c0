#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "owd/quadrature.hpp"
#include "owd/xstate.hpp"

namespace owd {

/// Inverse temperature 1/T. Zero temperature is a separate state rather
/// than a large number, so tanh(beta * omega) is exactly 1 there.
class InverseTemperature {
 public:
  static InverseTemperature infinite() { return InverseTemperature(); }

  /// Throws std::invalid_argument unless beta is finite and positive.
  static InverseTemperature finite(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw std::invalid_argument("inverse temperature must be finite and > 0");
    return InverseTemperature(beta);
  }

  /// T = 0 maps to infinite beta.
  static InverseTemperature from_temperature(double temperature) {
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
      throw std::invalid_argument("temperature must be finite and >= 0");
    return temperature == 0.0 ? infinite() : finite(1.0 / temperature);
  }

  bool is_infinite() const { return infinite_; }

  /// Only meaningful when !is_infinite().
  double value() const { return beta_; }

  /// tanh(beta * omega), exactly 1 at zero temperature.
  double occupation_factor(double omega) const {
    return infinite_ ? 1.0 : std::tanh(beta_ * omega);
  }

  friend bool operator==(const InverseTemperature&,
                         const InverseTemperature&) = default;

 private:
  InverseTemperature() = default;
  explicit InverseTemperature(double beta) : beta_(beta), infinite_(false) {}

  double beta_ = std::numeric_limits<double>::infinity();
  bool infinite_ = true;
};

/// Transverse-field XY chain
///   H = -Σ [(1+γ)/2 σ1σ1 + (1-γ)/2 σ2σ2 + h σ3].
struct XYParams {
  double gamma = 1.0;
  double h = 0.0;
};

/// XY chain plus the three-site coupling λ with anisotropy δ, at inverse
/// temperature beta.
struct ExtIsingParams {
  double gamma = 1.0;
  double delta = 1.0;
  double lambda = 0.0;
  double h = 0.0;
  InverseTemperature beta = InverseTemperature::infinite();
};

/// Quasiparticle energy ω_φ = sqrt(γ² sin²φ + (h + cosφ)²) of the XY chain.
double xy_energy(const XYParams& params, double phi);

/// Ground-state correlator G_l, l ∈ {-1, 0, 1}, of the XY chain in the
/// thermodynamic limit. Throws SingularIntegrand if ω_φ < 1e-12 on the
/// check grid or at a quadrature node.
double xy_correlator(const XYParams& params, int l,
                     const QuadratureOptions& quad = {});

/// Two-adjacent-spin state: r = s = G0, c1 = G-1, c2 = G1,
/// c3 = G0² - G1 G-1.
XState xy_state(const XYParams& params, const QuadratureOptions& quad = {});

/// Bogoliubov angle Θ̃_φ = atan2(Y(φ), Z(φ)) of the extended Ising chain,
/// using the winding-vector components Y, Z (see topology.hpp).
double ext_ising_angle(const ExtIsingParams& params, double phi);

/// Thermal correlator G̃_l = -(1/π) ∫_0^π tanh(β ω̃_φ) cos(lφ - Θ̃_φ) dφ.
double ext_ising_correlator(const ExtIsingParams& params, int l,
                            const QuadratureOptions& quad = {});

XState ext_ising_state(const ExtIsingParams& params,
                       const QuadratureOptions& quad = {});

/// Integrand of G̃_l at a single wavevector, exposed for continuity checks.
double ext_ising_integrand(const ExtIsingParams& params, int l, double phi);

}  // namespace owd
