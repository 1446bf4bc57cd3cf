#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lgfb::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kSolverError = 2, kUndecided = 3 };

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgfb::cli
