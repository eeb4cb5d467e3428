#pragma once

#include <string>
#include <vector>

#include "nrlab/arith.hpp"

namespace nrlab {

struct SweepOptions {
  unsigned threads = 0;               // 0: hardware concurrency
  u64 work_budget = 100'000'000;      // max symbol evaluations per prime
};

/// A prime the sweep passed over, with the reason.
struct SkipNote {
  u64 p = 0;
  std::string reason;
  bool over_budget = false;
};

struct Theorem1Quantities {
  OddPrime p{17};
  double E = 0.0;     // p^{1/(4 sqrt e)} exp(sqrt(ln p ln ln p / e))
  double B = 0.0;     // sqrt(E ln p)
  double Kmax = 0.0;  // p^{1/(8 sqrt e)} exp(sqrt(ln p ln ln p / e)/2 - ln ln p / 2)
};

inline constexpr u64 kTheorem1MinPrime = 17;

/// Requires p >= 17.
Theorem1Quantities theorem1_quantities(const OddPrime& p);

/// One row of the n_k(p) sweep.
struct BoundRecord {
  u64 p = 0;
  u64 n1 = 0;
  u64 k = 0;
  u64 nk = 0;
  double E = 0.0;
  double ratio = 0.0;  // nk / E
  u64 count_plus = 0;  // residues in [1, nk]
  u64 count_minus = 0; // nonresidues in [1, nk]
  std::string notes;

  friend bool operator==(const BoundRecord&, const BoundRecord&) = default;
};

/// k per prime: either a fixed value or min(floor(Kmax), cap, (p-1)/2).
struct KPolicy {
  bool use_kmax = false;
  u64 k = 1;

  static KPolicy fixed(u64 k) { return {false, k}; }
  static KPolicy kmax() { return {true, 0}; }
};

struct Theorem1Sweep {
  std::vector<BoundRecord> records;
  std::vector<SkipNote> skipped;
  double max_ratio = 0.0;
  u64 argmax_p = 0;
};

Theorem1Sweep theorem1_sweep(const PrimeRange& range, KPolicy policy, u64 cap, const SweepOptions& opts = {});

struct Theorem2Quantities {
  OddPrime p{3};
  double eps = 0.0;
  double c = 0.0;
  double y_threshold = 0.0;  // p^{1/(4 sqrt e)} exp(c (ln p)^{1 - eps})
};

/// Requires 0 < eps <= xi and c > 0.
Theorem2Quantities theorem2_quantities(const OddPrime& p, double eps, double c);

struct Theorem2Row {
  u64 p = 0;
  u64 y = 0;
  u64 count_plus = 0;
  u64 count_minus = 0;
  double normalized_plus = 0.0;   // count * (ln y)^eps / y
  double normalized_minus = 0.0;
  double mean = 0.0;              // M_chi(y)
  double fork_residual = 0.0;     // max over theta of |count - y(1 + theta M)/2|
  bool fork_ok = false;           // fork_residual <= y/p + 2

  friend bool operator==(const Theorem2Row&, const Theorem2Row&) = default;
};

struct Theorem2Sweep {
  std::vector<Theorem2Row> rows;
  std::vector<SkipNote> skipped;
  double min_normalized = 0.0;
  u64 argmin_p = 0;
  bool all_fork_ok = true;
};

Theorem2Sweep theorem2_sweep(const PrimeRange& range, double eps, double c, const SweepOptions& opts = {});

struct MchinRow {
  u64 p = 0;
  u64 x0 = 0;          // ceil(threshold)
  double mean_abs = 0.0;
  double scaled = 0.0;  // |M_chi(x0)| (ln p)^{c^2}

  friend bool operator==(const MchinRow&, const MchinRow&) = default;
};

struct MchinSweep {
  std::vector<MchinRow> rows;
  std::vector<SkipNote> skipped;
  double max_scaled = 0.0;
  u64 argmax_p = 0;
};

MchinSweep mchin_sweep(const PrimeRange& range, double c, const SweepOptions& opts = {});

struct CountingCheck {
  i64 lhs = 0;
  double rhs = 0.0;
  bool ok = false;
};

/// sum_{n <= x} (n|p) against x - 2 sum_{q} x/q - 2 over prime nonresidues
/// n1 <= q <= x. Requires 1 <= x < n1(p)^3.
CountingCheck counting_inequality_check(const OddPrime& p, u64 x);

enum class CaseBranch { dense, witness, large_n1 };

const char* to_string(CaseBranch b);

struct CaseReport {
  u64 p = 0;
  u64 k = 0;
  double C = 1.0;
  u64 n1 = 0;
  u64 nk = 0;
  double E = 0.0;
  double B = 0.0;
  double k_limit = 0.0;  // C E^{1/2} (ln p)^{-1/2}
  bool k_within_limit = false;
  u64 nonresidues_in_2k = 0;
  CaseBranch branch = CaseBranch::dense;
  std::vector<u64> witnesses;  // N m_i, witness branch only
  double realized_bound = 0.0;
  bool bound_holds = false;
  // Large-n1 branch quantities; recorded, not asserted.
  double x_choice = 0.0;       // e^{-3C} M^{sqrt e}
  bool x_in_window = false;    // M < x < N^3
  std::string notes;
};

CaseReport case_analysis_report(const OddPrime& p, u64 k, double C = 1.0);

}  // namespace nrlab
