#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netident::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kInvalidQuery = 2,
  kNotIdentifiable = 3,
  kNoRonlySetup = 4,
};

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netident::cli
