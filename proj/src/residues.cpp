#include "nrlab/residues.hpp"

#include <string>

namespace nrlab {

u64 nth_nonresidue(const OddPrime& p, u64 k) {
  const u64 half = (p.value() - 1) / 2;
  require(k >= 1 && k <= half, Errc::out_of_range,
          "nth_nonresidue: k=" + std::to_string(k) + " but only " + std::to_string(half) +
              " nonresidues exist in [1, " + std::to_string(p.value() - 1) + "]");
  u64 seen = 0;
  for (u64 n = 2; n < p.value(); ++n) {
    if (legendre(n, p) == -1 && ++seen == k) return n;
  }
  fail(Errc::verification_failed, "nth_nonresidue: scan ended early; symbol routine is inconsistent");
}

u64 count_by_symbol(const OddPrime& p, u64 y, SymbolValue theta) {
  require(theta != 0, Errc::invalid_argument, "count_by_symbol: theta must be +1 or -1");
  // Each full period [1, p] holds exactly (p - 1) / 2 of each class.
  const u64 periods = y / p.value();
  const u64 rem = y % p.value();
  u64 count = periods * ((p.value() - 1) / 2);
  for (u64 n = 1; n <= rem; ++n) {
    if (legendre(n, p) == theta) ++count;
  }
  return count;
}

bool gauss_check(const OddPrime& p) {
  require(p.value() % 8 == 1, Errc::invalid_argument,
          "gauss_check: " + std::to_string(p.value()) + " is not 1 mod 8");
  const double n1 = static_cast<double>(least_nonresidue(p));
  return n1 < 2.0 * std::sqrt(static_cast<double>(p.value())) + 1.0;
}

Decomposition vinogradov_decompose(u64 n, const OddPrime& p) {
  require(n >= 1, Errc::invalid_argument, "vinogradov_decompose: n must be positive");
  const int s = legendre(n, p);
  require(s != 1, Errc::invalid_argument, "vinogradov_decompose: " + std::to_string(n) + " is a residue");
  require(s != 0, Errc::invalid_argument, "vinogradov_decompose: p divides " + std::to_string(n));
  const u64 n1 = least_nonresidue(p);
  require(u128(n) < u128(n1) * n1 * n1, Errc::out_of_range,
          "vinogradov_decompose: n >= n1(p)^3, representation need not be unique");

  u64 q = 0;
  int nonresidue_factors = 0;
  for (u64 f : factorize(n)) {
    if (legendre(f, p) == -1) {
      q = f;
      ++nonresidue_factors;
    }
  }
  require(nonresidue_factors == 1, Errc::verification_failed,
          "vinogradov_decompose: expected exactly one nonresidue prime factor of " + std::to_string(n));
  const Decomposition d{n, q, n / q};
  require(legendre(d.m, p) == 1, Errc::verification_failed, "vinogradov_decompose: cofactor is not a residue");
  return d;
}

NonresidueTable nonresidue_table(const OddPrime& p, u64 limit) {
  require(limit >= 1, Errc::invalid_argument, "nonresidue_table: limit must be >= 1");
  NonresidueTable t{p, limit, {}, 0, 0};
  for (u64 n = 1; n <= limit; ++n) {
    switch (legendre(n, p).value()) {
      case 1: ++t.residue_count; break;
      case -1: t.nonresidues.push_back(n); break;
      default: break;
    }
  }
  t.nonresidue_count = t.nonresidues.size();
  return t;
}

}  // namespace nrlab
