#pragma once

#include <ostream>

namespace gerve {

/// Entry point of the `gerve` command-line tool. Returns the process exit code:
/// 0 success, 1 invalid input or usage error, 2 numeric failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gerve
