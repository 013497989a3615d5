#pragma once

#include <string>
#include <vector>

namespace pemsim {

/// Command-line entry point (args exclude the program name). Returns the
/// process exit code: 0 only when the command's embedded verifications
/// pass. Validation failures write no output files.
int run_cli(const std::vector<std::string>& args);

}  // namespace pemsim
