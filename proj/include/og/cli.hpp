#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace og {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitFindings = 1, kExitUsage = 2, kExitLimit = 3 };

/// Runs the `ogcheck` tool; `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace og
