#pragma once

#include <ostream>

namespace bcrecon {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 1,          // unreadable input, bad flags
  kExitPrecondition = 2,   // failed conditions, missing boundary, too few eigenvalues
  kExitNumerical = 3,      // numerical failure; perturb: forward stage below 19 eigenvalues
  kExitInconsistent = 4,   // minor vector violates the Pluecker relations
  kExitVerifyFailed = 5,   // verify: round trip above threshold
};

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcrecon
