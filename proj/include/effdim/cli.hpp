#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "effdim/error.hpp"

namespace effdim::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kNumericalFailure = 3,
  kContractViolation = 4,
};

int exit_code_for(ErrorCode code);

/// Runs the command line `args` (without the program name). Reports go to
/// `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace effdim::cli
