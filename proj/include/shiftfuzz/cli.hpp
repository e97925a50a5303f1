#pragma once

#include <string>
#include <vector>

namespace shiftfuzz {

/// Runs the command line front end; args excludes the program name.
/// Returns 0 on success, 1 on runtime or I/O failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args);

}  // namespace shiftfuzz
