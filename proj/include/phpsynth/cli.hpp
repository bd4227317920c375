#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phpsynth {

/// Exit statuses of the command-line front-end.
enum ExitCode : int {
  kExitOk = 0,
  kExitCorpusFailure = 1,  // a required corpus row failed
  kExitParse = 2,          // specification or program text does not parse
  kExitSearch = 3,         // search exhausted or specification unsupported
  kExitVerify = 4,         // verification found disagreements
  kExitRuntime = 5,        // interpreter error (step limit, bad input, ...)
  kExitUsage = 64,
};

/// Runs `phpsynth <args...>` (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phpsynth
