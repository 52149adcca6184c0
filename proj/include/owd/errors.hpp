#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace owd {

/// Base class for every numerical failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bloch parameters outside the set of valid density matrices.
class NonPhysicalState : public Error {
 public:
  using Error::Error;
};

/// The minimizer or an adaptive integrator failed to reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

/// The quasiparticle energy vanishes on the integration grid. Carries the
/// swept parameter value when raised from inside a sweep.
class SingularIntegrand : public Error {
 public:
  explicit SingularIntegrand(const std::string& what,
                             std::optional<double> at = std::nullopt)
      : Error(what), at_(at) {}

  std::optional<double> at() const { return at_; }

 private:
  std::optional<double> at_;
};

/// The winding-vector loop touches the origin, so the winding number is
/// undefined.
class GapClosed : public Error {
 public:
  using Error::Error;
};

/// The characteristic function does not depend on the free parameter in a
/// way that yields isolated critical values.
class NoRoots : public Error {
 public:
  using Error::Error;
};

}  // namespace owd
