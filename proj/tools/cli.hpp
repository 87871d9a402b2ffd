#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace p4d::cli {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2 };

/// Runs the command line (args excludes the program name). Reports go to
/// `out` unless --out redirects them; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace p4d::cli
