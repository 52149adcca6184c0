#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "owd/models.hpp"
#include "owd/xstate.hpp"

namespace owd {

enum class Model { xy, ext_ising };
enum class Parameter { h, lambda, gamma };

std::string_view to_string(Model model);
std::string_view to_string(Parameter param);

/// A point of either phase diagram. delta, lambda and beta are ignored for
/// the XY chain, which is always evaluated at zero temperature.
struct ModelPoint {
  Model model = Model::xy;
  double gamma = 1.0;
  double delta = 1.0;
  double lambda = 0.0;
  double h = 0.0;
  InverseTemperature beta = InverseTemperature::infinite();

  double get(Parameter param) const;
  ModelPoint with(Parameter param, double value) const;
};

struct NumericOptions {
  QuadratureOptions quadrature;
  MinimizerOptions minimizer;
};

/// Two-site reduced state of the model at this point.
XState model_state(const ModelPoint& point, const NumericOptions& opts = {});

DeficitResult deficit_at(const ModelPoint& point,
                         const NumericOptions& opts = {});

/// Parameter values where the model's gap closes along `param`, used to keep
/// sweep samples off singular integrands. For the XY chain: h = ±1, and
/// γ = 0 inside |h| < 1. For the extended Ising chain: the unit-circle roots
/// of the characteristic function.
std::vector<double> critical_values(const ModelPoint& point, Parameter param);

/// Move `x` to c + 1e-6 if it lies within 1e-6 of a critical value c.
double avoid_critical(double x, std::span<const double> critical);

struct SweepSpec {
  ModelPoint base;
  Parameter param = Parameter::h;
  double lo = 0.0;
  double hi = 1.0;
  int samples = 3;
  /// Central-difference step; defaults to the sample spacing, in which case
  /// neighbouring samples are reused.
  std::optional<double> fd_step;
  /// Minimum |χ| for an extremum; defaults to 10 × minimizer tolerance / δx.
  std::optional<double> noise_floor;
  NumericOptions numeric;
  unsigned threads = 1;

  /// Throws std::invalid_argument on lo >= hi, samples < 3, a non-positive
  /// fd_step, or a parameter the model does not have.
  void validate() const;
};

struct SweepRow {
  double x;
  double deficit;
  /// NaN where undefined (the two end rows).
  double chi;
};

struct Extremum {
  double x;
  double chi;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<Extremum> extrema;
};

/// Deficit at every sample, χ by central differences at interior samples,
/// and the interior samples where |χ| is a strict local maximum above the
/// noise floor. Rows are bit-identical for any thread count. A
/// SingularIntegrand is rethrown carrying the offending x.
SweepResult run_sweep(const SweepSpec& spec);

/// [Δ(x + step) - Δ(x - step)] / (2 step) at the point's current value of
/// `param`.
double susceptibility(const ModelPoint& point, Parameter param, double step,
                      const NumericOptions& opts = {});

/// Indices i with |χ_i| > |χ_{i±1}| and |χ_i| > floor.
std::vector<Extremum> find_extrema(std::span<const SweepRow> rows,
                                   double floor);

struct CriticalMatch {
  double critical;
  std::optional<double> nearest;
  double distance;
  bool matched;
};

struct ValidationReport {
  std::vector<CriticalMatch> matches;
  bool pass;
};

/// Pairs every critical value in [lo, hi] with the nearest extremum; PASS iff
/// each lies within `window`.
ValidationReport validate_extrema(std::span<const double> extrema_x,
                                  std::span<const double> critical,
                                  double window, double lo, double hi);

/// Range taken from the rows; throws std::invalid_argument unless window
/// exceeds the sample spacing.
ValidationReport validate_extrema(const SweepResult& result,
                                  std::span<const double> critical,
                                  double window);

}  // namespace owd
