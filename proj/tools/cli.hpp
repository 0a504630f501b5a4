#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sbg::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kParse = 2, kMismatch = 3, kIo = 4 };

/// Runs one invocation; `args` excludes the program name. JSON results go
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sbg::cli
