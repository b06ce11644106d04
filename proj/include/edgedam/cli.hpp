#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace edgedam {

/// Entry point behind the `edgedam` binary. `args` excludes the program name.
/// Returns the process exit code (0 or 1).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgedam
