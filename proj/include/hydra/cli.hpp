#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hydra::cli {

enum ExitCode { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Runs one command line (args[0] is the program name). Machine-readable
/// output goes to `out`, logs and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hydra::cli
