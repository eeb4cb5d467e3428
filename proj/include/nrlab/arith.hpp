#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nrlab/error.hpp"

namespace nrlab {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Largest modulus accepted anywhere in the library.
inline constexpr u64 kMaxModulus = (u64{1} << 63) - 1;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }
u64 powmod(u64 base, u64 exp, u64 m);

/// Deterministic primality for the full 64-bit range (Miller-Rabin with a
/// fixed base set that has no 64-bit pseudoprimes).
bool is_prime(u64 n);

/// A prime p >= 3, validated on construction. Logs are cached because nearly
/// every envelope formula consumes them.
class OddPrime {
 public:
  explicit OddPrime(u64 value);

  u64 value() const noexcept { return value_; }
  double log() const noexcept { return log_; }
  double loglog() const noexcept { return loglog_; }

  operator u64() const noexcept { return value_; }  // NOLINT: arithmetic convenience

  friend bool operator==(const OddPrime&, const OddPrime&) = default;

 private:
  u64 value_;
  double log_;
  double loglog_;
};

/// Value of a real character: -1, 0 or +1.
class SymbolValue {
 public:
  constexpr SymbolValue() = default;
  constexpr explicit SymbolValue(int v) : v_(v) {
    if (v < -1 || v > 1) fail(Errc::invalid_argument, "symbol value must be -1, 0 or +1");
  }
  constexpr int value() const noexcept { return v_; }
  constexpr operator int() const noexcept { return v_; }  // NOLINT

  static constexpr SymbolValue residue() { return SymbolValue(1); }
  static constexpr SymbolValue nonresidue() { return SymbolValue(-1); }

  friend constexpr bool operator==(SymbolValue, SymbolValue) = default;

 private:
  int v_ = 0;
};

/// Jacobi symbol (a|n) for odd n >= 1, binary algorithm.
int jacobi(u64 a, u64 n);

/// Legendre symbol (n|p); n is reduced mod p first.
SymbolValue legendre(i64 n, const OddPrime& p);
inline SymbolValue legendre(u64 n, const OddPrime& p) {
  return SymbolValue(jacobi(n % p.value(), p.value()));
}

struct SieveOptions {
  std::size_t segment_size = std::size_t{1} << 20;
  u64 max_span = u64{1} << 34;
};

/// All primes in [lo, hi], ascending. Immutable once built.
struct PrimeRange {
  u64 lo = 2;
  u64 hi = 2;
  std::vector<u64> primes;

  bool covers(u64 a, u64 b) const noexcept { return lo <= a && b <= hi; }
  bool empty() const noexcept { return primes.empty(); }
  std::size_t size() const noexcept { return primes.size(); }
  auto begin() const { return primes.begin(); }
  auto end() const { return primes.end(); }
};

PrimeRange primes_in(u64 lo, u64 hi, const SieveOptions& opts = {});

/// Chebyshev theta: sum of log q over primes q <= v.
double chebyshev_theta(double v, const PrimeRange& primes);

/// Smallest prime factor of n >= 2, by trial division.
u64 least_prime_factor(u64 n);

/// Prime factors of n with multiplicity, ascending.
std::vector<u64> factorize(u64 n);

}  // namespace nrlab
