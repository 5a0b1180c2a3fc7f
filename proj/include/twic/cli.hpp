#pragma once

#include <string>
#include <vector>

namespace twic {

/// Outcome of one CLI invocation: exit code 0 (success), 1 (verification or
/// feasibility failure), 2 (usage error). Machine-readable output goes to
/// `out`, diagnostics to `err`.
struct CommandResult {
    int exit_code = 0;
    std::string out;
    std::string err;
};

/// Dispatches a full argument vector (without argv[0]).
CommandResult run_cli(const std::vector<std::string>& args);

}  // namespace twic
