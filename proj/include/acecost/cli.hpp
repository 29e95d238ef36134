#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace acecost::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kAnalysisError = 2,
  kOracleMismatch = 3,
  kUsage = 64,
};

/// Runs the command line with `args` (excluding the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace acecost::cli
