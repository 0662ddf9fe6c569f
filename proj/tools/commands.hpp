#ifndef TOPSAMP_TOOLS_COMMANDS_HPP
#define TOPSAMP_TOOLS_COMMANDS_HPP

#include <ostream>

namespace topsamp::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kValidationFailure = 4,
};

/// Runs one `topsamp` subcommand. Tables go to --output or to `out`,
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace topsamp::cli

#endif  // TOPSAMP_TOOLS_COMMANDS_HPP
