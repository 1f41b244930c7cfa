#pragma once

#include <string>
#include <vector>

namespace pmlab {

// Parses and executes one command line (argv without the program name).
// Returns a process exit code: 0 on success, 1 when a run or a diagnostic
// check fails, 2 on usage, parse, or validation errors.
int run_command(const std::vector<std::string>& args);

}  // namespace pmlab
