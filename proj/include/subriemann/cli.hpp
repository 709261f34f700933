#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace subriemann {

/// Exit codes of the command line tool.
enum ExitCode : int { kExitPass = 0, kExitTolerance = 1, kExitConfig = 2 };

/// Runs one command line (without the program name). JSON reports go to `out`, human
/// readable messages to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subriemann
