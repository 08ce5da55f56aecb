#ifndef TSE_CLI_HPP
#define TSE_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace tse::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kInvalidInput = 2,
  kNoEquilibrium = 3,
  kDegenerateClamp = 4,
  kBoundaryCase = 5,
};

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`. Nothing is written to `out` or to an output
/// file unless the command succeeds.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace tse::cli

#endif  // TSE_CLI_HPP
