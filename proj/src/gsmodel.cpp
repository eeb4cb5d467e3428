#include "nrlab/gsmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace nrlab {

namespace {

double lambda_value() { return (5.0 * kPi - 2.0) / (9.0 * kPi - 2.0); }

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod (7, 15) on [a, b]; `rel_tol` is relative to the L1 norm.
template <class F>
Integral gk15(F&& f, double a, double b, double rel_tol) {
  Integral r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, rel_tol, &r.error);
  return r;
}

// Snap a grid coordinate to the nearest integer when it is within rounding noise.
double snap(double beta) {
  const double r = std::round(beta);
  return std::abs(beta - r) <= 1e-9 * std::max(1.0, std::abs(beta)) ? r : beta;
}

}  // namespace

double delta1_compute(double tol) {
  require(tol > 0.0 && tol <= 1e-4, Errc::invalid_argument, "delta1_compute: tol must lie in (0, 1e-4]");
  const auto r = gk15([](double u) { return std::log(u) / (u + 1.0); }, 1.0, kSqrtE, tol);
  require(r.error <= tol && std::isfinite(r.value), Errc::no_convergence,
          "delta1_compute: quadrature did not reach tol " + std::to_string(tol));
  return 1.0 - 2.0 * std::log(1.0 + kSqrtE) + 4.0 * r.value;
}

Constants constants(double quad_tol) {
  Constants c;
  c.lambda = lambda_value();
  c.eta = 0.25 - 1.0 / (2.0 * kPi);
  c.xi = (kPi - 2.0) / (9.0 * kPi - 2.0);
  c.delta1 = delta1_compute(quad_tol);
  return c;
}

// ---------------------------------------------------------------------------
// Multiplicative data

double MultiplicativeSpec::at(u64 q) const {
  if (auto it = prime_values.find(q); it != prime_values.end()) return it->second;
  return static_cast<double>(q) <= y ? inside : beyond;
}

MultiplicativeSpec MultiplicativeSpec::constant(double value, double y) { return {{}, y, value, value}; }

MultiplicativeSpec MultiplicativeSpec::unit_below(double y, double beyond) { return {{}, y, 1.0, beyond}; }

void validate(const MultiplicativeSpec& spec) {
  auto in_unit = [](double v) { return v >= -1.0 && v <= 1.0; };
  require(spec.y > 0.0, Errc::invalid_argument, "MultiplicativeSpec: y must be positive");
  require(in_unit(spec.inside) && in_unit(spec.beyond), Errc::invalid_argument,
          "MultiplicativeSpec: default values must lie in [-1, 1]");
  for (const auto& [q, v] : spec.prime_values) {
    require(in_unit(v), Errc::invalid_argument,
            "MultiplicativeSpec: value at " + std::to_string(q) + " outside [-1, 1]");
  }
}

double tau(const MultiplicativeSpec& spec, double x_alpha, const PrimeRange& primes) {
  validate(spec);
  if (x_alpha < 2.0) return 0.0;
  const auto top = static_cast<u64>(std::floor(x_alpha));
  require(primes.covers(2, top), Errc::insufficient_coverage,
          "tau: prime range does not cover [2, " + std::to_string(top) + "]");
  double sum = 0.0;
  for (u64 q : primes) {
    if (q > top) break;
    sum += (1.0 - spec.at(q)) / static_cast<double>(q);
  }
  return sum;
}

double theta_product(const MultiplicativeSpec& spec, const PrimeRange& primes) {
  validate(spec);
  if (spec.y < 2.0) return 1.0;
  const auto top = static_cast<u64>(std::floor(spec.y));
  require(primes.covers(2, top), Errc::insufficient_coverage,
          "theta_product: prime range does not cover [2, " + std::to_string(top) + "]");
  double prod = 1.0;
  for (u64 q : primes) {
    if (q > top) break;
    const double qd = static_cast<double>(q);
    prod *= (1.0 - 1.0 / qd) / (1.0 - spec.at(q) / qd);
  }
  return prod;
}

// ---------------------------------------------------------------------------
// Step kernels

StepKernel::StepKernel(std::vector<double> breakpoints, std::vector<double> values, double U)
    : breaks_(std::move(breakpoints)), values_(std::move(values)), U_(U) {
  require(!breaks_.empty() && breaks_.size() == values_.size(), Errc::invalid_argument,
          "StepKernel: need one value per breakpoint");
  require(breaks_.front() == 0.0, Errc::invalid_argument, "StepKernel: first breakpoint must be 0");
  require(U_ > 0.0 && std::isfinite(U_), Errc::invalid_argument, "StepKernel: U must be positive");
  for (std::size_t i = 1; i < breaks_.size(); ++i) {
    require(breaks_[i] > breaks_[i - 1], Errc::invalid_argument, "StepKernel: breakpoints must ascend strictly");
  }
  require(breaks_.back() < U_, Errc::invalid_argument, "StepKernel: breakpoints must lie below U");
  for (double v : values_) {
    require(v >= -1.0 && v <= 1.0, Errc::invalid_argument, "StepKernel: values must lie in [-1, 1]");
  }

  deficit_at_break_.resize(breaks_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < breaks_.size(); ++i) {
    const double s = std::max(breaks_[i], 1.0);
    if (i > 0) {
      const double prev = std::max(breaks_[i - 1], 1.0);
      if (s > prev) acc += (1.0 - values_[i - 1]) * std::log(s / prev);
    }
    deficit_at_break_[i] = acc;
  }
}

StepKernel StepKernel::constant(double value, double U) { return StepKernel({0.0}, {value}, U); }

StepKernel StepKernel::extremal(double U) {
  require(U > 1.0, Errc::invalid_argument, "StepKernel::extremal: U must exceed 1");
  return StepKernel({0.0, 1.0}, {1.0, -1.0}, U);
}

std::size_t StepKernel::piece(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return it == breaks_.begin() ? 0 : static_cast<std::size_t>(it - breaks_.begin()) - 1;
}

double StepKernel::at(double t) const { return values_[piece(t)]; }

double StepKernel::log_deficit(double u) const {
  require(u >= 1.0, Errc::out_of_range, "log_deficit: u must be >= 1");
  const std::size_t i = piece(u);
  const double s = std::max(breaks_[i], 1.0);
  return deficit_at_break_[i] + (1.0 - values_[i]) * std::log(u / s);
}

StepKernel kernel_from_spec(const MultiplicativeSpec& spec, double y, double U, const PrimeRange& primes) {
  validate(spec);
  require(y > 1.0, Errc::invalid_argument, "kernel_from_spec: y must exceed 1");
  require(U > 0.0, Errc::invalid_argument, "kernel_from_spec: U must be positive");
  const double log_y = std::log(y);
  const double top_real = std::exp(U * log_y);
  require(top_real < 0x1p62, Errc::budget_exhausted, "kernel_from_spec: y^U is too large");
  const auto top = static_cast<u64>(std::floor(top_real));
  require(top < 2 || primes.covers(2, top), Errc::insufficient_coverage,
          "kernel_from_spec: prime range does not cover [2, " + std::to_string(top) + "]");

  std::vector<double> breaks{0.0};
  std::vector<double> values{1.0};
  double weighted = 0.0;
  double theta = 0.0;
  for (u64 q : primes) {
    if (q > top) break;
    const double lq = std::log(static_cast<double>(q));
    const double t = lq / log_y;
    if (t >= U) break;
    weighted += spec.at(q) * lq;
    theta += lq;
    breaks.push_back(t);
    values.push_back(std::clamp(weighted / theta, -1.0, 1.0));
  }
  return StepKernel(std::move(breaks), std::move(values), U);
}

// ---------------------------------------------------------------------------
// I1, I2

double i1(double u, const StepKernel& kernel) {
  require(u >= 1.0 && u <= kernel.U() * (1.0 + 1e-12), Errc::out_of_range,
          "i1: u must lie in [1, " + std::to_string(kernel.U()) + "]");
  return kernel.log_deficit(u);
}

double i2(double u, const StepKernel& kernel, double tol) {
  require(u >= 1.0 && u <= kernel.U() * (1.0 + 1e-12), Errc::out_of_range,
          "i2: u must lie in [1, " + std::to_string(kernel.U()) + "]");
  require(tol > 0.0, Errc::invalid_argument, "i2: tol must be positive");
  if (u <= 2.0) return 0.0;

  // Integrate over t1 in [1, u - 1]; the inner t2-integral is log_deficit(u - t1).
  // The integrand is smooth between kernel breakpoints and their reflections.
  const double hi = u - 1.0;
  std::vector<double> cuts{1.0, hi};
  for (double b : kernel.breakpoints()) {
    if (b > 1.0 && b < hi) cuts.push_back(b);
    if (u - b > 1.0 && u - b < hi) cuts.push_back(u - b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const double scale = std::max(1.0, std::pow(kernel.log_deficit(u), 2));
  const double rel_tol = tol / scale;
  Integral total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    const double weight = 1.0 - kernel.at(0.5 * (a + b));
    if (weight == 0.0) continue;
    const auto r = gk15([&](double t) { return weight / t * kernel.log_deficit(u - t); }, a, b, rel_tol);
    total.value += r.value;
    total.error += r.error;
  }
  require(total.error <= tol && std::isfinite(total.value), Errc::no_convergence,
          "i2: quadrature error " + std::to_string(total.error) + " exceeds tol");
  return total.value;
}

// ---------------------------------------------------------------------------
// Volterra solver

double SigmaGrid::at(double u) const {
  require(u >= 0.0 && u <= U * (1.0 + 1e-12), Errc::out_of_range, "SigmaGrid::at: u outside grid");
  const double s = u / h;
  auto i = static_cast<std::size_t>(std::floor(s));
  if (i >= values.size() - 1) return values.back();
  const double frac = s - static_cast<double>(i);
  return values[i] + frac * (values[i + 1] - values[i]);
}

SigmaGrid sigma_solve(const StepKernel& kernel, double U, double h) {
  require(U >= 1.0, Errc::invalid_argument, "sigma_solve: U must be >= 1");
  require(h > 0.0 && h <= 1e-2, Errc::invalid_argument, "sigma_solve: h must lie in (0, 1e-2]");
  require(kernel.U() >= U * (1.0 - 1e-12), Errc::insufficient_coverage, "sigma_solve: kernel shorter than U");

  const auto n1 = static_cast<std::size_t>(std::ceil(1.0 / h - 1e-9));
  const double step = 1.0 / static_cast<double>(n1);
  const auto n = static_cast<std::size_t>(std::ceil(U * static_cast<double>(n1) - 1e-9));

  // Per cell [k h, (k+1) h], in units of h:
  //   a_k = (1/h) int X,   b_k = (1/h^2) int (t - k h) X(t) dt.
  std::vector<double> a(n), b(n);
  const auto& br = kernel.breakpoints();
  const auto& val = kernel.values();
  std::size_t piece = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = static_cast<double>(k);
    const double hi = lo + 1.0;
    while (piece + 1 < br.size() && snap(br[piece + 1] / step) <= lo) ++piece;
    double alpha0 = 0.0;
    double ak = 0.0;
    double bk = 0.0;
    std::size_t j = piece;
    while (j + 1 < br.size()) {
      const double beta = snap(br[j + 1] / step);
      if (beta >= hi) break;
      const double alpha1 = beta - lo;
      ak += val[j] * (alpha1 - alpha0);
      bk += val[j] * (alpha1 * alpha1 - alpha0 * alpha0) * 0.5;
      alpha0 = alpha1;
      ++j;
    }
    if (alpha0 == 0.0) {
      ak = val[j];
      bk = 0.5 * val[j];
    } else {
      ak += val[j] * (1.0 - alpha0);
      bk += val[j] * (1.0 - alpha0 * alpha0) * 0.5;
    }
    a[k] = ak;
    b[k] = bk;
  }

  // m sigma_m = sum_{j=1}^{m-1} sigma_{m-j} w_j + sigma_0 b_{m-1} + sigma_m (a_0 - b_0)
  std::vector<double> w(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) w[j] = (a[j] - b[j]) + b[j - 1];
  const double diag = a[0] - b[0];

  SigmaGrid grid{step, step * static_cast<double>(n), std::vector<double>(n + 1, 1.0)};
  auto& s = grid.values;
  for (std::size_t m = n1 + 1; m <= n; ++m) {
    double acc = s[0] * b[m - 1];
    for (std::size_t j = 1; j < m; ++j) acc += s[m - j] * w[j];
    const double den = static_cast<double>(m) - diag;
    require(std::abs(den) > 1e-12, Errc::no_convergence, "sigma_solve: singular implicit step");
    s[m] = acc / den;
  }
  return grid;
}

SigmaMinimum sigma_minimum(const SigmaGrid& grid, double lo, double hi) {
  hi = std::min(hi, grid.U);
  require(lo >= 0.0 && lo < hi, Errc::invalid_argument, "sigma_minimum: empty search interval");
  const auto first = static_cast<std::size_t>(std::ceil(lo / grid.h - 1e-9));
  const auto last = std::min(grid.values.size() - 1, static_cast<std::size_t>(std::floor(hi / grid.h + 1e-9)));
  std::size_t best = first;
  for (std::size_t i = first; i <= last; ++i) {
    if (grid.values[i] < grid.values[best]) best = i;
  }
  SigmaMinimum out{grid.u_at(best), grid.values[best]};
  if (best == 0 || best + 1 >= grid.values.size()) return out;

  // Quadratic through the bracketing nodes, minimised by golden section.
  const double f0 = grid.values[best - 1];
  const double f1 = grid.values[best];
  const double f2 = grid.values[best + 1];
  auto q = [&](double x) {  // x in [-1, 1], node spacing 1
    return f1 + 0.5 * (f2 - f0) * x + 0.5 * (f2 - 2.0 * f1 + f0) * x * x;
  };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = -1.0, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (q(c) < q(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  const double x = 0.5 * (a + b);
  if (q(x) < out.value) out = {grid.u_at(best) + x * grid.h, q(x)};
  return out;
}

SandwichResult sandwich_check(const StepKernel& kernel, double u, double h, double quad_tol) {
  require(u >= 1.0 && u <= kernel.U() * (1.0 + 1e-12), Errc::out_of_range,
          "sandwich_check: u must lie in [1, U]");
  const SigmaGrid grid = sigma_solve(kernel, std::max(u, 1.0), h);
  SandwichResult r;
  r.i1 = i1(u, kernel);
  r.i2 = i2(u, kernel, quad_tol);
  r.lower = 1.0 - r.i1;
  r.upper = 1.0 - r.i1 + r.i2;
  r.sigma = grid.at(u);
  const double slack = 5.0 * grid.h;
  require(r.lower <= r.sigma + slack && r.sigma <= r.upper + slack, Errc::verification_failed,
          fmt::format("sandwich ordering fails at u={}: {} <= {} <= {}", u, r.lower, r.sigma, r.upper));
  require(r.i2 <= r.i1 * r.i1 + quad_tol, Errc::verification_failed,
          fmt::format("I2 > I1^2 at u={}: I2={}, I1={}", u, r.i2, r.i1));
  return r;
}

I1TauPair i1_vs_tau_check(const MultiplicativeSpec& spec, double x, double alpha, const PrimeRange& primes) {
  require(alpha >= 1.0 / kSqrtE - 1e-15 && alpha <= 1.0 + 1e-15, Errc::out_of_range,
          "i1_vs_tau_check: alpha must lie in [1/sqrt(e), 1]");
  require(x >= 3.0, Errc::invalid_argument, "i1_vs_tau_check: x must be >= 3");
  const double lambda = lambda_value();
  const double log_x = std::log(x);
  I1TauPair out;
  out.y = std::exp(std::pow(log_x, lambda));
  out.u_alpha = alpha * std::pow(log_x, 1.0 - lambda);
  require(primes.covers(2, static_cast<u64>(std::floor(x))), Errc::insufficient_coverage,
          "i1_vs_tau_check: prime range does not cover [2, x]");
  for (u64 q : primes) {
    if (static_cast<double>(q) > out.y) break;
    require(spec.at(q) == 1.0, Errc::invalid_argument,
            "i1_vs_tau_check: g(" + std::to_string(q) + ") must be 1 below y");
  }
  const double x_alpha = std::exp(alpha * log_x);
  out.tau = tau(spec, x_alpha, primes);
  if (out.u_alpha <= 1.0) {
    out.i1 = 0.0;
    return out;
  }
  const StepKernel kernel = kernel_from_spec(spec, out.y, out.u_alpha, primes);
  out.i1 = i1(out.u_alpha, kernel);
  return out;
}

double envelope(double alpha, double delta1) {
  require(alpha >= 1.0 / kSqrtE - 1e-15 && alpha <= 1.0 + 1e-15, Errc::out_of_range,
          "envelope: alpha must lie in [1/sqrt(e), 1]");
  const double la = std::log(alpha);
  return std::max(std::abs(delta1), 0.5 + 2.0 * la * la);
}

void write_tsv(const SigmaGrid& grid, std::ostream& out) {
  out << "u\tsigma\n";
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    out << fmt::format("{:.17g}\t{:.17g}\n", grid.u_at(i), grid.values[i]);
  }
}

}  // namespace nrlab
