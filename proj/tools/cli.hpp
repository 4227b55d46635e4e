#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nldelta::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // I/O errors, failed validation run
  kValidation = 2,
  kNoBranch = 3,
  kNoBoundState = 4,
};

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nldelta::cli
