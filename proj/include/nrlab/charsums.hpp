#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nrlab/arith.hpp"

namespace nrlab {

/// S(M, N) = sum of (n|p) over M < n <= M + N.
struct SumWindow {
  i64 M = 0;
  i64 N = 1;
  i64 value = 0;
};

struct BurgessParams {
  OddPrime p{3};
  i64 N = 1;
  i64 r = 1;
  double rhs = 0.0;
};

struct BurgessChoice {
  i64 r = 1;
  double rhs = 0.0;
};

struct ChunkOptions {
  i64 chunk = i64{1} << 16;
  unsigned threads = 1;
};

SumWindow char_sum(const OddPrime& p, i64 M, i64 N, const ChunkOptions& opts = {});

/// (1/x) * sum_{n <= x} (n|p).
double mean_value(const OddPrime& p, u64 x, const ChunkOptions& opts = {});

/// 30 N^{1-1/r} p^{(r+1)/(4r^2)} (ln p)^{1/r}
BurgessParams burgess_rhs(const OddPrime& p, i64 N, i64 r);

/// Minimises burgess_rhs over 1 <= r <= r_max; ties go to the smaller r.
BurgessChoice best_burgess_r(const OddPrime& p, i64 N, i64 r_max);

/// floor( (1/(2c)) sqrt(ln p / ln ln p) ), for 0 < c <= (ln p)^{1/3}.
i64 mchin_r_choice(const OddPrime& p, double c);

/// p^{1/4} exp(c sqrt(ln p ln ln p)), for 0 <= c <= (ln p)^{1/3}.
double mchin_threshold(const OddPrime& p, double c);

/// (ln p)^{-c^2}: the decay shape, implied constant omitted.
double mchin_bound(const OddPrime& p, double c);

/// Prefix sums of (n|p) over one period. Answers any window sum in O(1);
/// built in O(p) by marking squares, so it is only meant for moderate p.
class PeriodTable {
 public:
  explicit PeriodTable(const OddPrime& p);

  const OddPrime& prime() const noexcept { return p_; }
  int symbol(i64 n) const noexcept;
  i64 window_sum(i64 M, i64 N) const noexcept { return partial(M + N) - partial(M); }

 private:
  // sum_{1 <= n <= x} (n|p), extended periodically to all integers x.
  i64 partial(i64 x) const noexcept;
  std::size_t reduce(i64 x) const noexcept;

  OddPrime p_;
  std::vector<std::int32_t> prefix_;
};

inline constexpr u64 kMaxPeriodTable = u64{1} << 31;

struct BurgessAudit {
  u64 seed = 0;
  std::size_t windows = 0;     // checks performed, summed over all r
  std::size_t violations = 0;
  double max_ratio = 0.0;      // max |S(M, N)| / rhs
};

/// Checks `windows` pseudo-random windows (M in [0, p), 1 <= N <= p) per
/// value of r against burgess_rhs. Window draws come from a 64-bit
/// Mersenne Twister seeded with (seed, p, r) and reduced by plain modulo so
/// the sample is identical on every platform.
BurgessAudit burgess_audit(const PeriodTable& table, std::span<const i64> rs, std::size_t windows, u64 seed);

}  // namespace nrlab
