#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace distbrush::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kRuntime = 3 };

/// Runs `distbrush <command> ...` in-process. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace distbrush::cli
