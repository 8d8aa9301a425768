#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace canonlab {

/// Exit codes of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvalid = 2, kExitUnequal = 3 };

/// Runs one command (args exclude the program name).  The JSON report goes
/// to `out`, diagnostics and usage text to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace canonlab
