#pragma once

#include <iosfwd>

namespace wradon {

enum ExitCode : int {
    exit_ok = 0,
    exit_condition_fails = 1,
    exit_usage = 2,
    exit_data = 3,
};

/// Entry point of the `wradon` command line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wradon
