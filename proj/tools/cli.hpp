#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gmqso::cli {

/// Exit codes.
enum Exit : int { kOk = 0, kValidation = 2, kCapacity = 3, kNonConvergence = 4 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out` (or files under --out-dir), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gmqso::cli
