#pragma once

#include <iosfwd>

namespace nrlab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kVerificationFailed = 2,
  kBudgetExhausted = 3,
};

/// Entry point behind the `nrlab` executable. Reads NRLAB_CONFIG and
/// NRLAB_CACHE from the environment; flags take precedence over both.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nrlab::cli
