#pragma once

#include <stdexcept>
#include <string>

namespace nrlab {

enum class Errc {
  invalid_argument,   // precondition violated by the caller
  out_of_range,       // index/parameter outside the supported range
  insufficient_coverage,
  no_convergence,
  budget_exhausted,
  verification_failed,  // a theorem-backed assertion did not hold
  io,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace nrlab
