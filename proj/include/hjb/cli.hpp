#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hjb {

/// Runs the hjb command line (args excludes the program name). Returns the
/// process exit code: 0 ok, 1 bad configuration, 2 domain error, 3 failed
/// invariant check.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hjb
