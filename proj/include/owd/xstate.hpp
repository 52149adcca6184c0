#pragma once

#include <array>
#include <optional>

namespace owd {

/// Two-qubit X state in Bloch form
///   rho = (I⊗I + r σ3⊗I + s I⊗σ3 + Σ_n c_n σn⊗σn) / 4.
struct XState {
  double r = 0.0;
  double s = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  friend bool operator==(const XState&, const XState&) = default;
};

/// Four probabilities in descending order.
struct Spectrum4 {
  std::array<double, 4> p{};

  double sum() const { return p[0] + p[1] + p[2] + p[3]; }
};

/// Bloch vector (z1, z2, z3) of the projector applied to party b.
class MeasurementDirection {
 public:
  /// Throws std::invalid_argument unless |z| = 1 within 1e-12.
  MeasurementDirection(double z1, double z2, double z3);

  /// Polar angle theta from the z axis, azimuth phi from the x axis.
  static MeasurementDirection from_angles(double theta, double phi);

  double z1() const { return z1_; }
  double z2() const { return z2_; }
  double z3() const { return z3_; }

 private:
  double z1_;
  double z2_;
  double z3_;
};

struct MinimizerOptions {
  /// Seeds per angular axis of the reduced octant.
  int grid = 64;
  /// Objective tolerance of the simplex refinement.
  double tolerance = 1e-10;
  int max_iterations = 4000;
  /// Extra seed evaluated alongside the grid.
  std::optional<MeasurementDirection> warm_start;
};

struct DeficitResult {
  double deficit;
  MeasurementDirection argmin;
};

/// Closed-form eigenvalues of the X state, sorted descending.
/// Throws NonPhysicalState if any is below -1e-10.
Spectrum4 eigenvalues(const XState& state);

/// Shannon entropy in bits; 0 log 0 = 0 and entries in [-1e-10, 0) count as 0.
double entropy(const Spectrum4& spectrum);

/// Spectrum of Σ_k (I⊗B_k) rho (I⊗B_k) for the projective measurement
/// B_± = (I ± z·σ)/2 on party b.
Spectrum4 post_measurement_spectrum(const XState& state,
                                    const MeasurementDirection& dir);

double measured_entropy(const XState& state, const MeasurementDirection& dir);

/// One-way deficit: min over directions of measured_entropy minus the
/// entropy of the state. The returned argmin lies in the octant
/// z1, z2, z3 >= 0, which covers every distinct value of the objective.
DeficitResult one_way_deficit(const XState& state,
                              const MinimizerOptions& opts = {});

}  // namespace owd
