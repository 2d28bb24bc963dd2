#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jointaxis::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNotConverged = 3,
};

// args excludes the program name. Normal output goes to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace jointaxis::cli
