#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twistsym::cli {

enum ExitCode { Positive = 0, Negative = 1, Undecided = 2, InputError = 3 };

/// Runs the command line `args` (without the program name) and writes the
/// report to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twistsym::cli
