#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ontosim::cli {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFileNotFound = 2,
  kParseError = 3,
  kInvalidModel = 4,  // non-bijective law, conflicting special points
  kSizeCap = 5,
  kUnreachable = 6,
  kNotRepresentable = 7,
  kQuadrature = 8,
  kIoError = 9,
  kInternal = 10,
};

// args excludes the program name. Data goes to `out` (or files), diagnostics
// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ontosim::cli
