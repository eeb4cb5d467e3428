#include "nrlab/charsums.hpp"

#include <cmath>
#include <random>
#include <string>

#include "nrlab/parallel.hpp"

namespace nrlab {

namespace {

u64 mod_p(i64 x, u64 p) {
  const i64 m = static_cast<i64>(p);
  i64 r = x % m;
  if (r < 0) r += m;
  return static_cast<u64>(r);
}

// Sum of (n|p) for n = first, first+1, ..., first+count-1 where `first` is
// given by its residue mod p.
i64 run_sum(u64 residue, i64 count, const OddPrime& p) {
  i64 s = 0;
  for (i64 i = 0; i < count; ++i) {
    s += jacobi(residue, p.value());
    if (++residue == p.value()) residue = 0;
  }
  return s;
}

void check_c_range(const OddPrime& p, double c, bool allow_zero, const char* who) {
  const double cmax = std::cbrt(p.log());
  const bool ok = (allow_zero ? c >= 0.0 : c > 0.0) && c <= cmax;
  require(ok, Errc::out_of_range,
          std::string(who) + ": c=" + std::to_string(c) + " outside " + (allow_zero ? "[0, " : "(0, ") +
              std::to_string(cmax) + "]");
}

}  // namespace

SumWindow char_sum(const OddPrime& p, i64 M, i64 N, const ChunkOptions& opts) {
  require(N >= 1, Errc::invalid_argument, "char_sum: N must be >= 1");
  require(opts.chunk >= 1, Errc::invalid_argument, "char_sum: chunk must be >= 1");
  const i64 chunks = (N + opts.chunk - 1) / opts.chunk;
  std::vector<i64> partial(static_cast<std::size_t>(chunks), 0);
  parallel_for(partial.size(), opts.threads, [&](std::size_t c) {
    const i64 offset = static_cast<i64>(c) * opts.chunk;
    const i64 len = std::min(opts.chunk, N - offset);
    partial[c] = run_sum(mod_p(M + 1 + offset, p.value()), len, p);
  });
  i64 total = 0;
  for (i64 v : partial) total += v;
  return {M, N, total};
}

double mean_value(const OddPrime& p, u64 x, const ChunkOptions& opts) {
  require(x >= 1, Errc::invalid_argument, "mean_value: x must be >= 1");
  return static_cast<double>(char_sum(p, 0, static_cast<i64>(x), opts).value) / static_cast<double>(x);
}

BurgessParams burgess_rhs(const OddPrime& p, i64 N, i64 r) {
  require(N >= 1, Errc::invalid_argument, "burgess_rhs: N must be >= 1");
  require(r >= 1, Errc::invalid_argument, "burgess_rhs: r must be >= 1");
  const double rr = static_cast<double>(r);
  const double rhs = 30.0 * std::pow(static_cast<double>(N), 1.0 - 1.0 / rr) *
                     std::pow(static_cast<double>(p.value()), (rr + 1.0) / (4.0 * rr * rr)) *
                     std::pow(p.log(), 1.0 / rr);
  return {p, N, r, rhs};
}

BurgessChoice best_burgess_r(const OddPrime& p, i64 N, i64 r_max) {
  require(r_max >= 1, Errc::invalid_argument, "best_burgess_r: r_max must be >= 1");
  BurgessChoice best{1, burgess_rhs(p, N, 1).rhs};
  for (i64 r = 2; r <= r_max; ++r) {
    const double v = burgess_rhs(p, N, r).rhs;
    if (v < best.rhs) best = {r, v};
  }
  return best;
}

i64 mchin_r_choice(const OddPrime& p, double c) {
  check_c_range(p, c, false, "mchin_r_choice");
  const double r = std::floor(std::sqrt(p.log() / p.loglog()) / (2.0 * c));
  require(r >= 1.0, Errc::out_of_range, "mchin_r_choice: degenerate choice r = 0");
  return static_cast<i64>(r);
}

double mchin_threshold(const OddPrime& p, double c) {
  check_c_range(p, c, true, "mchin_threshold");
  return std::pow(static_cast<double>(p.value()), 0.25) * std::exp(c * std::sqrt(p.log() * p.loglog()));
}

double mchin_bound(const OddPrime& p, double c) {
  check_c_range(p, c, true, "mchin_bound");
  return std::pow(p.log(), -c * c);
}

PeriodTable::PeriodTable(const OddPrime& p) : p_(p) {
  require(p.value() <= kMaxPeriodTable, Errc::budget_exhausted, "PeriodTable: modulus too large");
  const u64 q = p.value();
  std::vector<std::int8_t> chi(q, -1);
  chi[0] = 0;
  // i^2 mod q for i = 1..(q-1)/2 enumerates each nonzero square once.
  u64 sq = 0;
  for (u64 i = 1; i <= (q - 1) / 2; ++i) {
    sq += 2 * i - 1;
    while (sq >= q) sq -= q;
    chi[sq] = 1;
  }
  prefix_.assign(q, 0);
  std::int32_t run = 0;
  for (u64 n = 1; n < q; ++n) {
    run += chi[n];
    prefix_[n] = run;
  }
}

std::size_t PeriodTable::reduce(i64 x) const noexcept { return static_cast<std::size_t>(mod_p(x, p_.value())); }

int PeriodTable::symbol(i64 n) const noexcept {
  const std::size_t r = reduce(n);
  if (r == 0) return 0;
  return prefix_[r] - prefix_[r - 1];
}

i64 PeriodTable::partial(i64 x) const noexcept { return prefix_[reduce(x)]; }

BurgessAudit burgess_audit(const PeriodTable& table, std::span<const i64> rs, std::size_t windows, u64 seed) {
  const OddPrime& p = table.prime();
  BurgessAudit audit{seed, 0, 0, 0.0};
  for (i64 r : rs) {
    std::mt19937_64 rng(seed ^ (p.value() * 0x9E3779B97F4A7C15ULL) ^ static_cast<u64>(r));
    for (std::size_t w = 0; w < windows; ++w) {
      const auto M = static_cast<i64>(rng() % p.value());
      const auto N = static_cast<i64>(1 + rng() % p.value());
      const double s = std::abs(static_cast<double>(table.window_sum(M, N)));
      const double rhs = burgess_rhs(p, N, r).rhs;
      audit.max_ratio = std::max(audit.max_ratio, s / rhs);
      if (s > rhs) ++audit.violations;
      ++audit.windows;
    }
  }
  return audit;
}

}  // namespace nrlab
