#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace owd::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kValidationFail = 4,
};

/// Runs the command line in-process. CSV goes to --out (or `out` when no
/// path is given); diagnostics go to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_number(double value);

}  // namespace owd::cli
