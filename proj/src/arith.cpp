#include "nrlab/arith.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>
#include <utility>

namespace nrlab {

u64 powmod(u64 base, u64 exp, u64 m) {
  u64 result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

namespace {

bool miller_rabin_witness(u64 n, u64 d, int s, u64 a) {
  a %= n;
  if (a == 0) return false;
  u64 x = powmod(a, d, n);
  if (x == 1 || x == n - 1) return false;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

}  // namespace

bool is_prime(u64 n) {
  if (n < 2) return false;
  static constexpr std::array<u64, 12> small = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 q : small) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  if (n < 41 * 41) return true;
  const int s = std::countr_zero(n - 1);
  const u64 d = (n - 1) >> s;
  // Jim Sinclair's base set: deterministic below 2^64.
  static constexpr std::array<u64, 7> bases = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
  return std::none_of(bases.begin(), bases.end(),
                      [&](u64 a) { return miller_rabin_witness(n, d, s, a); });
}

OddPrime::OddPrime(u64 value) : value_(value) {
  require(value >= 3 && (value & 1) == 1, Errc::invalid_argument,
          "modulus must be an odd prime >= 3, got " + std::to_string(value));
  require(value <= kMaxModulus, Errc::out_of_range, "modulus exceeds 2^63 - 1");
  require(is_prime(value), Errc::invalid_argument, std::to_string(value) + " is not prime");
  log_ = std::log(static_cast<double>(value));
  loglog_ = std::log(log_);
}

int jacobi(u64 a, u64 n) {
  require((n & 1) == 1, Errc::invalid_argument, "jacobi: modulus must be odd");
  a %= n;
  int t = 1;
  while (a != 0) {
    const int z = std::countr_zero(a);
    a >>= z;
    // (2|n) = -1 iff n = 3, 5 (mod 8)
    if ((z & 1) && ((n & 7) == 3 || (n & 7) == 5)) t = -t;
    if (a < n) {
      std::swap(a, n);
      if ((a & n & 3) == 3) t = -t;
    }
    a -= n;
  }
  return n == 1 ? t : 0;
}

SymbolValue legendre(i64 n, const OddPrime& p) {
  const i64 m = static_cast<i64>(p.value());
  i64 r = n % m;
  if (r < 0) r += m;
  return SymbolValue(jacobi(static_cast<u64>(r), p.value()));
}

namespace {

// Odd primes up to limit (inclusive), plain sieve on odd numbers.
std::vector<u64> base_primes(u64 limit) {
  std::vector<u64> out;
  if (limit < 3) return out;
  const std::size_t count = static_cast<std::size_t>((limit - 1) / 2);  // 3, 5, ..., limit
  std::vector<bool> composite(count, false);
  for (std::size_t i = 0; i < count; ++i) {
    if (composite[i]) continue;
    const u64 q = 2 * i + 3;
    out.push_back(q);
    for (u64 j = q * q; j <= limit; j += 2 * q) composite[static_cast<std::size_t>((j - 3) / 2)] = true;
  }
  return out;
}

u64 isqrt(u64 n) {
  auto r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && (u128(r) * r > n)) --r;
  while (u128(r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace

PrimeRange primes_in(u64 lo, u64 hi, const SieveOptions& opts) {
  require(lo >= 2, Errc::invalid_argument, "primes_in: lo must be >= 2");
  require(lo <= hi, Errc::invalid_argument,
          "primes_in: range order violated (lo=" + std::to_string(lo) + " > hi=" + std::to_string(hi) + ")");
  require(hi - lo <= opts.max_span, Errc::budget_exhausted, "primes_in: span exceeds segment budget");
  require(opts.segment_size >= 64, Errc::invalid_argument, "primes_in: segment size too small");

  PrimeRange range{lo, hi, {}};
  if (lo <= 2) range.primes.push_back(2);

  const auto sieving = base_primes(isqrt(hi));
  // Segments cover odd numbers only; slot i of a segment starting at odd s is s + 2i.
  u64 start = std::max<u64>(lo, 3) | 1;
  const std::size_t seg = opts.segment_size;
  std::vector<unsigned char> composite(seg);
  while (start <= hi) {
    const u64 span_odds = (hi - start) / 2 + 1;
    const std::size_t n = static_cast<std::size_t>(std::min<u64>(seg, span_odds));
    const u64 last = start + 2 * (n - 1);
    std::fill_n(composite.begin(), n, 0);
    for (u64 q : sieving) {
      const u64 qq = q * q;
      if (qq > last) break;
      u64 first = std::max(qq, (start + q - 1) / q * q);
      if ((first & 1) == 0) first += q;
      for (u64 j = first; j <= last; j += 2 * q) composite[static_cast<std::size_t>((j - start) / 2)] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const u64 v = start + 2 * i;
      if (!composite[i] && v >= 3) range.primes.push_back(v);
    }
    if (last >= hi || last > kMaxModulus) break;
    start = last + 2;
  }
  return range;
}

double chebyshev_theta(double v, const PrimeRange& primes) {
  if (v < 2.0) return 0.0;
  const auto top = static_cast<u64>(std::floor(v));
  require(primes.lo <= 2 && primes.hi >= top, Errc::insufficient_coverage,
          "chebyshev_theta: prime range does not cover [2, " + std::to_string(top) + "]");
  double sum = 0.0;
  for (u64 q : primes) {
    if (q > top) break;
    sum += std::log(static_cast<double>(q));
  }
  return sum;
}

u64 least_prime_factor(u64 n) {
  require(n >= 2, Errc::invalid_argument, "least_prime_factor: n must be >= 2");
  if ((n & 1) == 0) return 2;
  for (u64 d = 3; d <= n / d; d += 2) {
    if (n % d == 0) return d;
  }
  return n;
}

std::vector<u64> factorize(u64 n) {
  std::vector<u64> out;
  while (n > 1) {
    const u64 q = least_prime_factor(n);
    while (n % q == 0) {
      out.push_back(q);
      n /= q;
    }
  }
  return out;
}

}  // namespace nrlab
