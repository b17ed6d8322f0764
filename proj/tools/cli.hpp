#pragma once

// qfb command-line harness. run_cli is the whole program minus process
// setup, so it can be driven in-process.

#include <ostream>

namespace qfb::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
  kIoError = 4,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfb::cli
