#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tizx {

/// Exit codes of the command line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitIo = 4,
};

/// Runs one subcommand (optimize, validate-tables, ber, psd, report).
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tizx
