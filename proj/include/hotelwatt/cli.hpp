#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hotelwatt/error.hpp"

namespace hotelwatt::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kTraining = 3,
  kProvider = 4,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hotelwatt::cli
