#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hhp::cli {

// Exit codes of the hhp tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 2,        // bad arguments, unparsable input, malformed files
  kDegenerate = 3,   // the mathematics has no answer for these parameters
  kVerifyFailed = 4  // a numerical check exceeded its threshold
};

// Runs the tool on argv-style arguments (args[0] is the program name).
// Reports go to `out` unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hhp::cli
