#pragma once

#include <vector>

#include "nrlab/arith.hpp"

namespace nrlab {

/// Positive nonresidues n <= limit for one prime, plus symbol counts.
/// Multiples of p count as neither residues nor nonresidues, so
/// residue_count + nonresidue_count + limit / p == limit.
struct NonresidueTable {
  OddPrime p{3};
  u64 limit = 1;
  std::vector<u64> nonresidues;
  u64 residue_count = 0;
  u64 nonresidue_count = 0;

  friend bool operator==(const NonresidueTable&, const NonresidueTable&) = default;
};

/// n = q * m with q a prime nonresidue and m a residue.
struct Decomposition {
  u64 n = 0;
  u64 q = 0;
  u64 m = 0;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

/// k-th smallest positive nonresidue, 1 <= k <= (p - 1) / 2.
u64 nth_nonresidue(const OddPrime& p, u64 k);
inline u64 least_nonresidue(const OddPrime& p) { return nth_nonresidue(p, 1); }

/// #{1 <= n <= y : (n|p) = theta}, theta = +1 or -1.
u64 count_by_symbol(const OddPrime& p, u64 y, SymbolValue theta);

/// n1(p) < 2 sqrt(p) + 1; requires p = 1 (mod 8).
bool gauss_check(const OddPrime& p);

/// Unique q*m split of a nonresidue n < n1(p)^3. Refuses residues and
/// inputs outside the uniqueness regime.
Decomposition vinogradov_decompose(u64 n, const OddPrime& p);

NonresidueTable nonresidue_table(const OddPrime& p, u64 limit);

}  // namespace nrlab
