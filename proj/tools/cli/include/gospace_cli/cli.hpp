#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gospace::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kComputation = 3,
  kNegative = 4,  // not-GO, rejected metric or failed campaign
  kInconclusive = 5,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// JSON goes to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gospace::cli
