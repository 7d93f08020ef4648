#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cassi::cli {

/// Process exit codes. Every failure path maps to one of these.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,          // parse, dimension, format, I/O and any other error
  kExitMaskDegenerate = 3,
  kExitDiverged = 4,
  kExitOracleBreach = 5,
};

/// Entry point of the `cassi` binary. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cassi::cli
