#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "nrlab/arith.hpp"

namespace nrlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtE = 1.64872127070012814685;

struct Constants {
  double lambda = 0.0;  // (5pi - 2) / (9pi - 2)
  double eta = 0.0;     // 1/4 - 1/(2pi)
  double xi = 0.0;      // (pi - 2) / (9pi - 2)
  double delta1 = 0.0;
};

inline constexpr double kDefaultQuadTol = 1e-8;
inline constexpr double kDefaultGridH = 1e-3;

Constants constants(double quad_tol = kDefaultQuadTol);

/// 1 - 2 ln(1 + sqrt e) + 4 * int_1^{sqrt e} ln u / (u + 1) du, with the
/// integral computed adaptively to absolute accuracy tol (0 < tol <= 1e-4).
double delta1_compute(double tol);

/// Real-valued completely multiplicative function, given by its values at
/// primes. Primes <= y not listed take `inside`; primes > y take `beyond`.
struct MultiplicativeSpec {
  std::map<u64, double> prime_values;
  double y = 1.0;
  double inside = 1.0;
  double beyond = 1.0;

  double at(u64 q) const;

  static MultiplicativeSpec constant(double value, double y);
  /// g(q) = 1 for q <= y, `beyond` above.
  static MultiplicativeSpec unit_below(double y, double beyond);
};

void validate(const MultiplicativeSpec& spec);

/// Piecewise-constant kernel on [0, U]: values[i] holds on
/// [breakpoints[i], breakpoints[i+1]), the last value up to U (and beyond,
/// when a solver grid overshoots U by less than one step).
class StepKernel {
 public:
  StepKernel(std::vector<double> breakpoints, std::vector<double> values, double U);

  static StepKernel constant(double value, double U);
  /// 1 on [0, 1], -1 afterwards.
  static StepKernel extremal(double U);

  double at(double t) const;
  double U() const noexcept { return U_; }
  const std::vector<double>& breakpoints() const noexcept { return breaks_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// int_1^u (1 - X(t)) / t dt in closed form, u >= 1.
  double log_deficit(double u) const;

 private:
  std::size_t piece(double t) const;

  std::vector<double> breaks_;
  std::vector<double> values_;
  double U_;
  std::vector<double> deficit_at_break_;  // log_deficit at max(break, 1)
};

/// Solution of u sigma(u) = int_0^u sigma(u - t) X(t) dt on a uniform grid.
struct SigmaGrid {
  double h = 0.0;
  double U = 0.0;
  std::vector<double> values;  // sigma(i h), i = 0..n

  double u_at(std::size_t i) const noexcept { return h * static_cast<double>(i); }
  /// Linear interpolation between grid points.
  double at(double u) const;
};

struct SigmaMinimum {
  double u = 0.0;
  double value = 0.0;
};

struct SandwichResult {
  double lower = 0.0;  // 1 - I1
  double sigma = 0.0;
  double upper = 0.0;  // 1 - I1 + I2
  double i1 = 0.0;
  double i2 = 0.0;
};

struct I1TauPair {
  double i1 = 0.0;
  double tau = 0.0;
  double y = 0.0;        // exp((ln x)^lambda)
  double u_alpha = 0.0;  // alpha (ln x)^{1 - lambda}
};

/// sum over primes q <= x_alpha of (1 - g(q)) / q.
double tau(const MultiplicativeSpec& spec, double x_alpha, const PrimeRange& primes);

/// prod over q <= spec.y of (1 - 1/q) / (1 - f(q)/q).
double theta_product(const MultiplicativeSpec& spec, const PrimeRange& primes);

/// X(t) = sum_{q <= y^t} g(q) ln q / theta(y^t), with X = 1 below the first
/// prime.
StepKernel kernel_from_spec(const MultiplicativeSpec& spec, double y, double U, const PrimeRange& primes);

double i1(double u, const StepKernel& kernel);
double i2(double u, const StepKernel& kernel, double tol = kDefaultQuadTol);

/// Marches the integral equation with sigma = 1 on [0, 1]. sigma is treated
/// as piecewise linear between grid points and the kernel is integrated
/// exactly cell by cell; the implicit diagonal term is solved in closed form.
/// The step is shrunk to 1 / ceil(1 / h) so that u = 1 is a grid point.
SigmaGrid sigma_solve(const StepKernel& kernel, double U, double h = kDefaultGridH);

/// Grid scan over [lo, hi] followed by golden-section refinement on the
/// local quadratic interpolant.
SigmaMinimum sigma_minimum(const SigmaGrid& grid, double lo = 1.0, double hi = 5.0);

/// (1 - I1, sigma(u), 1 - I1 + I2); throws verification_failed when the
/// ordering fails by more than 5h or when I2 > I1^2.
SandwichResult sandwich_check(const StepKernel& kernel, double u, double h = kDefaultGridH,
                              double quad_tol = kDefaultQuadTol);

I1TauPair i1_vs_tau_check(const MultiplicativeSpec& spec, double x, double alpha, const PrimeRange& primes);

/// max(|delta1|, 1/2 + 2 (ln alpha)^2) for 1/sqrt(e) <= alpha <= 1.
double envelope(double alpha, double delta1);

void write_tsv(const SigmaGrid& grid, std::ostream& out);

}  // namespace nrlab
