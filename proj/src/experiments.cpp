#include "nrlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "nrlab/charsums.hpp"
#include "nrlab/gsmodel.hpp"
#include "nrlab/parallel.hpp"
#include "nrlab/residues.hpp"

namespace nrlab {

namespace {

const double kInvFourSqrtE = 1.0 / (4.0 * kSqrtE);

// Theorem-1 quantities without the p >= 17 guard; valid whenever ln ln p > 0.
Theorem1Quantities theorem1_raw(const OddPrime& p) {
  const double root = std::sqrt(p.log() * p.loglog() / std::exp(1.0));
  Theorem1Quantities q{p, 0.0, 0.0, 0.0};
  q.E = std::exp(kInvFourSqrtE * p.log() + root);
  q.B = std::sqrt(q.E * p.log());
  q.Kmax = std::exp(0.5 * kInvFourSqrtE * p.log() + 0.5 * root - 0.5 * p.loglog());
  return q;
}

double xi_value() { return (kPi - 2.0) / (9.0 * kPi - 2.0); }

std::vector<u64> odd_primes(const PrimeRange& range) {
  std::vector<u64> out;
  out.reserve(range.size());
  for (u64 q : range) {
    if (q != 2) out.push_back(q);
  }
  return out;
}

}  // namespace

Theorem1Quantities theorem1_quantities(const OddPrime& p) {
  require(p.value() >= kTheorem1MinPrime, Errc::out_of_range,
          "theorem1_quantities: p must be >= 17, got " + std::to_string(p.value()));
  return theorem1_raw(p);
}

Theorem1Sweep theorem1_sweep(const PrimeRange& range, KPolicy policy, u64 cap, const SweepOptions& opts) {
  require(policy.use_kmax || policy.k >= 1, Errc::invalid_argument, "theorem1_sweep: fixed k must be >= 1");
  require(cap >= 1, Errc::invalid_argument, "theorem1_sweep: cap must be >= 1");
  const auto ps = odd_primes(range);
  std::vector<std::optional<BoundRecord>> rows(ps.size());
  std::vector<std::optional<SkipNote>> skips(ps.size());

  parallel_for(ps.size(), opts.threads, [&](std::size_t i) {
    const OddPrime p(ps[i]);
    const u64 half = (p.value() - 1) / 2;
    const auto q = theorem1_raw(p);
    BoundRecord rec;
    rec.p = p.value();
    rec.E = q.E;
    if (policy.use_kmax) {
      const u64 kmax = std::max<u64>(1, static_cast<u64>(std::floor(q.Kmax)));
      rec.k = std::min({kmax, cap, half});
      rec.notes = rec.k == kmax ? "k=Kmax" : (rec.k == cap ? "k=cap" : "k=(p-1)/2");
    } else {
      if (policy.k > half) {
        skips[i] = SkipNote{p.value(), fmt::format("k={} exceeds (p-1)/2={}", policy.k, half), false};
        return;
      }
      rec.k = std::min(policy.k, cap);
      if (rec.k != policy.k) rec.notes = "k=cap";
    }
    if (p.value() < kTheorem1MinPrime) rec.notes += rec.notes.empty() ? "p<17" : ";p<17";
    rec.n1 = least_nonresidue(p);
    rec.nk = rec.k == 1 ? rec.n1 : nth_nonresidue(p, rec.k);
    rec.ratio = static_cast<double>(rec.nk) / rec.E;
    rec.count_plus = count_by_symbol(p, rec.nk, SymbolValue::residue());
    rec.count_minus = count_by_symbol(p, rec.nk, SymbolValue::nonresidue());
    rows[i] = std::move(rec);
  });

  Theorem1Sweep out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (skips[i]) out.skipped.push_back(std::move(*skips[i]));
    if (!rows[i]) continue;
    if (rows[i]->ratio > out.max_ratio) {
      out.max_ratio = rows[i]->ratio;
      out.argmax_p = rows[i]->p;
    }
    out.records.push_back(std::move(*rows[i]));
  }
  return out;
}

Theorem2Quantities theorem2_quantities(const OddPrime& p, double eps, double c) {
  require(eps > 0.0 && eps <= xi_value(), Errc::out_of_range,
          fmt::format("theorem2: eps={} outside (0, xi={}]", eps, xi_value()));
  require(c > 0.0, Errc::out_of_range, "theorem2: c must be positive");
  const double y = std::exp(kInvFourSqrtE * p.log() + c * std::pow(p.log(), 1.0 - eps));
  return {p, eps, c, y};
}

Theorem2Sweep theorem2_sweep(const PrimeRange& range, double eps, double c, const SweepOptions& opts) {
  // Validates eps and c even when the range is empty.
  theorem2_quantities(OddPrime(3), eps, c);
  const auto ps = odd_primes(range);
  std::vector<std::optional<Theorem2Row>> rows(ps.size());
  std::vector<std::optional<SkipNote>> skips(ps.size());

  parallel_for(ps.size(), opts.threads, [&](std::size_t i) {
    const OddPrime p(ps[i]);
    const auto q = theorem2_quantities(p, eps, c);
    const double yr = std::ceil(q.y_threshold);
    if (!(yr <= static_cast<double>(opts.work_budget))) {
      skips[i] = SkipNote{p.value(), fmt::format("y={:.6g} exceeds work budget {}", yr, opts.work_budget), true};
      return;
    }
    Theorem2Row row;
    row.p = p.value();
    row.y = static_cast<u64>(yr);
    row.count_plus = count_by_symbol(p, row.y, SymbolValue::residue());
    row.count_minus = count_by_symbol(p, row.y, SymbolValue::nonresidue());
    const double yd = static_cast<double>(row.y);
    const double lift = std::pow(std::log(yd), eps) / yd;
    row.normalized_plus = static_cast<double>(row.count_plus) * lift;
    row.normalized_minus = static_cast<double>(row.count_minus) * lift;

    // Full periods sum to zero, so only the trailing partial period matters.
    const u64 tail = row.y % p.value();
    const i64 s = tail == 0 ? 0 : char_sum(p, static_cast<i64>(row.y - tail), static_cast<i64>(tail)).value;
    row.mean = static_cast<double>(s) / yd;
    const double rp = std::abs(static_cast<double>(row.count_plus) - 0.5 * yd * (1.0 + row.mean));
    const double rm = std::abs(static_cast<double>(row.count_minus) - 0.5 * yd * (1.0 - row.mean));
    row.fork_residual = std::max(rp, rm);
    row.fork_ok = row.fork_residual <= yd / static_cast<double>(p.value()) + 2.0;
    rows[i] = row;
  });

  Theorem2Sweep out;
  out.min_normalized = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (skips[i]) out.skipped.push_back(std::move(*skips[i]));
    if (!rows[i]) continue;
    const auto& r = *rows[i];
    const double lo = std::min(r.normalized_plus, r.normalized_minus);
    if (lo < out.min_normalized) {
      out.min_normalized = lo;
      out.argmin_p = r.p;
    }
    out.all_fork_ok = out.all_fork_ok && r.fork_ok;
    out.rows.push_back(r);
  }
  if (out.rows.empty()) out.min_normalized = 0.0;
  return out;
}

MchinSweep mchin_sweep(const PrimeRange& range, double c, const SweepOptions& opts) {
  const auto ps = odd_primes(range);
  require(c > 0.0, Errc::out_of_range, "mchin_sweep: c must be positive");
  if (!ps.empty()) {
    // (ln p)^{1/3} is smallest at the smallest prime.
    const OddPrime first(ps.front());
    require(c <= std::cbrt(first.log()), Errc::out_of_range,
            fmt::format("mchin_sweep: c={} exceeds (ln p)^(1/3)={} at p={}", c, std::cbrt(first.log()), ps.front()));
  }
  std::vector<std::optional<MchinRow>> rows(ps.size());
  std::vector<std::optional<SkipNote>> skips(ps.size());

  parallel_for(ps.size(), opts.threads, [&](std::size_t i) {
    const OddPrime p(ps[i]);
    const double x0 = std::ceil(mchin_threshold(p, c));
    if (!(x0 <= static_cast<double>(opts.work_budget))) {
      skips[i] = SkipNote{p.value(), fmt::format("x0={:.6g} exceeds work budget {}", x0, opts.work_budget), true};
      return;
    }
    MchinRow row;
    row.p = p.value();
    row.x0 = static_cast<u64>(x0);
    row.mean_abs = std::abs(mean_value(p, row.x0));
    row.scaled = row.mean_abs / mchin_bound(p, c);
    rows[i] = row;
  });

  MchinSweep out;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (skips[i]) out.skipped.push_back(std::move(*skips[i]));
    if (!rows[i]) continue;
    if (rows[i]->scaled > out.max_scaled || out.rows.empty()) {
      out.max_scaled = rows[i]->scaled;
      out.argmax_p = rows[i]->p;
    }
    out.rows.push_back(*rows[i]);
  }
  return out;
}

CountingCheck counting_inequality_check(const OddPrime& p, u64 x) {
  require(x >= 1, Errc::invalid_argument, "counting_inequality_check: x must be >= 1");
  const u64 n1 = least_nonresidue(p);
  require(u128(x) < u128(n1) * n1 * n1, Errc::out_of_range,
          fmt::format("counting_inequality_check: x={} must be below n1(p)^3={}", x, n1 * n1 * n1));
  CountingCheck out;
  out.lhs = char_sum(p, 0, static_cast<i64>(x)).value;
  double tail = 0.0;
  if (x >= n1) {
    const double xd = static_cast<double>(x);
    for (u64 q : primes_in(n1, x)) {
      if (legendre(q, p) == -1) tail += xd / static_cast<double>(q);
    }
  }
  out.rhs = static_cast<double>(x) - 2.0 * tail - 2.0;
  out.ok = static_cast<double>(out.lhs) >= out.rhs;
  return out;
}

const char* to_string(CaseBranch b) {
  switch (b) {
    case CaseBranch::dense: return "case1-dense";
    case CaseBranch::witness: return "case1-witness";
    case CaseBranch::large_n1: return "case2";
  }
  return "?";
}

CaseReport case_analysis_report(const OddPrime& p, u64 k, double C) {
  const u64 half = (p.value() - 1) / 2;
  require(k >= 1, Errc::invalid_argument, "case_analysis_report: k must be >= 1");
  require(k <= half, Errc::out_of_range,
          fmt::format("case_analysis_report: k={} exceeds (p-1)/2={}", k, half));
  require(C > 0.0, Errc::invalid_argument, "case_analysis_report: C must be positive");

  const auto q = theorem1_raw(p);
  CaseReport r;
  r.p = p.value();
  r.k = k;
  r.C = C;
  r.n1 = least_nonresidue(p);
  r.nk = nth_nonresidue(p, k);
  r.E = q.E;
  r.B = q.B;
  r.k_limit = C * std::sqrt(q.E / p.log());
  r.k_within_limit = static_cast<double>(k) <= r.k_limit;
  // 2k <= p - 1, so [1, 2k] holds no multiple of p.
  r.nonresidues_in_2k = count_by_symbol(p, 2 * k, SymbolValue::nonresidue());

  if (static_cast<double>(r.n1) <= r.B) {
    if (r.nonresidues_in_2k >= k) {
      r.branch = CaseBranch::dense;
      r.realized_bound = static_cast<double>(2 * k);
    } else {
      r.branch = CaseBranch::witness;
      for (u64 m = 1; m <= 2 * k && r.witnesses.size() < k; ++m) {
        if (legendre(m, p) == 1) {
          const u64 w = r.n1 * m;
          require(legendre(w, p) == -1, Errc::verification_failed,
                  fmt::format("case_analysis_report: witness {} is not a nonresidue mod {}", w, r.p));
          r.witnesses.push_back(w);
        }
      }
      require(r.witnesses.size() == k, Errc::verification_failed,
              "case_analysis_report: fewer than k residues in [1, 2k]");
      r.realized_bound = 2.0 * static_cast<double>(k) * r.B;
    }
  } else {
    r.branch = CaseBranch::large_n1;
    r.realized_bound = std::pow(r.B, 2.5);
    const double M = static_cast<double>(r.nk);
    const double N = static_cast<double>(r.n1);
    r.x_choice = std::exp(-3.0 * C) * std::pow(M, kSqrtE);
    r.x_in_window = M < r.x_choice && r.x_choice < N * N * N;
    r.notes = "case2 chain needs large p; recorded only";
  }
  r.bound_holds = static_cast<double>(r.nk) <= r.realized_bound;
  if (!r.k_within_limit) r.notes += r.notes.empty() ? "k above C E^(1/2)(ln p)^(-1/2)" : "; k above limit";
  return r;
}

}  // namespace nrlab
