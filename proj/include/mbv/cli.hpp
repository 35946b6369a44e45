#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mbv::cli {

/// Exit statuses shared by every subcommand.
enum ExitCode : int {
    kSuccess = 0,
    kDomainError = 1,  // includes validation failures and invalid configs
    kEnvironmentError = 2,  // I/O, parse, and usage errors
};

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`; `--output` redirects reports to a file.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mbv::cli
