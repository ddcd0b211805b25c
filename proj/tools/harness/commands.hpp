#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levymlmc::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitInfeasible = 3,
  kExitNumeric = 4,
};

// Entry point of the levymlmc-harness executable. Output files are written
// only when the command succeeds; failures print one JSON error record to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levymlmc::harness
