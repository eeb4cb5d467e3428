#include "nrlab/cli.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "nrlab/charsums.hpp"
#include "nrlab/experiments.hpp"
#include "nrlab/gsmodel.hpp"
#include "nrlab/report.hpp"
#include "nrlab/residues.hpp"

namespace nrlab::cli {

namespace {

struct SweepIo {
  std::string csv;
  std::string json;
  std::string write_lock;
  std::string check_lock;

  void add_to(CLI::App* sub) {
    sub->add_option("--csv", csv, "Write rows as CSV");
    sub->add_option("--json", json, "Write rows as JSON");
    sub->add_option("--write-lock", write_lock, "Record the summary statistic in a lock file");
    sub->add_option("--check-lock", check_lock, "Compare the summary statistic against a lock file");
  }
};

struct KernelChoice {
  std::string name = "extremal";
  double y = 10.0;
  double beyond = -1.0;

  void add_to(CLI::App* sub) {
    sub->add_option("--kernel", name, "one | extremal | unit-below")
        ->check(CLI::IsMember({"one", "extremal", "unit-below"}));
    sub->add_option("--y", y, "unit-below: g(q) = 1 for q <= y");
    sub->add_option("--beyond", beyond, "unit-below: g(q) for q > y");
  }

  StepKernel build(double U, const Config& cfg) const {
    if (name == "one") return StepKernel::constant(1.0, U);
    if (name == "extremal") return StepKernel::extremal(U);
    const auto top = static_cast<u64>(std::floor(std::pow(y, U)));
    const auto primes = primes_in(2, std::max<u64>(top, 2), {cfg.segment_size});
    return kernel_from_spec(MultiplicativeSpec::unit_below(y, beyond), y, U, primes);
  }
};

template <class Row>
void emit_rows(const std::vector<Row>& rows, const SweepIo& io) {
  if (!io.csv.empty()) {
    std::ofstream f(io.csv);
    require(static_cast<bool>(f), Errc::io, "cannot open " + io.csv);
    write_csv(f, rows);
  }
  if (!io.json.empty()) {
    std::ofstream f(io.json);
    require(static_cast<bool>(f), Errc::io, "cannot open " + io.json);
    write_json(f, rows);
  }
}

// Applies lock handling and reports skipped primes; returns the exit code.
int finish_sweep(const LockStats& stats, const std::vector<SkipNote>& skipped, const SweepIo& io, bool verified,
                 std::ostream& out, std::ostream& err) {
  for (const auto& [name, v] : stats) out << name << '\t' << lock_render(v) << '\n';
  bool over_budget = false;
  for (const auto& s : skipped) {
    err << "skipped p=" << s.p << ": " << s.reason << '\n';
    over_budget = over_budget || s.over_budget;
  }
  if (!io.write_lock.empty()) write_lock(io.write_lock, stats);
  if (!io.check_lock.empty()) {
    const auto problems = check_lock(io.check_lock, stats);
    for (const auto& p : problems) err << "lock mismatch: " << p << '\n';
    if (!problems.empty()) verified = false;
  }
  if (!verified) return kVerificationFailed;
  return over_budget ? kBudgetExhausted : kOk;
}

double parse_eps(const std::string& s) {
  if (s == "xi") return constants(1e-8).xi;
  return std::stod(s);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quadratic nonresidue and character-sum laboratory", "nrlab"};
  app.require_subcommand(1);
  // `--h` is the grid-step flag of sigma and sandwich, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");

  Config cfg;
  std::string cache_dir;
  std::size_t segment_size = 0;
  double quad_tol = 0.0, grid_h = 0.0;
  u64 work_budget = 0, seed = 0;
  unsigned threads = 0;
  auto* o_cache = app.add_option("--cache-dir", cache_dir, "Cache directory");
  auto* o_seg = app.add_option("--segment-size", segment_size, "Sieve segment length");
  auto* o_qt = app.add_option("--quad-tol", quad_tol, "Quadrature tolerance");
  auto* o_h = app.add_option("--grid-h", grid_h, "Volterra grid step");
  auto* o_wb = app.add_option("--work-budget", work_budget, "Max symbol evaluations per prime");
  auto* o_seed = app.add_option("--seed", seed, "Seed for window sampling");
  auto* o_thr = app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  u64 p = 0;
  auto add_p = [&](CLI::App* sub) { sub->add_option("--p", p, "Odd prime modulus")->required(); };

  i64 n = 0;
  auto* symbol = app.add_subcommand("symbol", "Legendre symbol (n|p)");
  add_p(symbol);
  symbol->add_option("--n", n)->required();

  u64 k = 1;
  auto* nonres = app.add_subcommand("nonresidue", "k-th positive nonresidue");
  add_p(nonres);
  nonres->add_option("--k", k)->required();

  u64 limit = 1;
  bool list = false, no_cache = false;
  auto* table = app.add_subcommand("table", "Nonresidue table up to a limit (cached)");
  add_p(table);
  table->add_option("--limit", limit)->required();
  table->add_flag("--list", list, "Print the nonresidues");
  table->add_flag("--no-cache", no_cache, "Bypass the cache");

  i64 M = 0, N = 1;
  auto* sum = app.add_subcommand("sum", "Character sum over M < n <= M + N");
  add_p(sum);
  sum->add_option("--M", M)->required();
  sum->add_option("--N", N)->required();

  u64 x = 1;
  auto* mean = app.add_subcommand("mean", "Mean value (1/x) sum_{n<=x} (n|p)");
  add_p(mean);
  mean->add_option("--x", x)->required();

  i64 r = 1, r_max = 20;
  std::size_t audit = 0;
  auto* burgess = app.add_subcommand("burgess", "Burgess envelope 30 N^{1-1/r} p^{(r+1)/4r^2} (ln p)^{1/r}");
  add_p(burgess);
  burgess->add_option("--N", N)->required();
  auto* o_r = burgess->add_option("--r", r);
  auto* o_auto = burgess->add_option("--auto-r", r_max, "Minimise over 1 <= r <= R")->excludes(o_r);
  o_r->excludes(o_auto);
  burgess->add_option("--audit", audit, "Also check this many seeded windows per r in {1,2,3}");

  double c = 1.0;
  auto* mchin = app.add_subcommand("mchin", "Mean-value threshold, decay shape and r choice");
  add_p(mchin);
  mchin->add_option("--c", c)->required();

  auto* consts = app.add_subcommand("constants", "lambda, eta, xi, delta1 and identity residuals");

  double tol = 0.0;
  auto* d1 = app.add_subcommand("delta1", "delta1 by adaptive quadrature");
  d1->add_option("--tol", tol);

  KernelChoice kernel;
  double U = 5.0, h = 0.0, u = 2.0;
  std::string out_path;
  bool confirm = false;
  auto* sigma = app.add_subcommand("sigma", "Solve the integral equation on a grid");
  kernel.add_to(sigma);
  sigma->add_option("--U", U);
  sigma->add_option("--h", h, "Grid step (defaults to --grid-h)");
  sigma->add_option("--out", out_path, "TSV output (u, sigma)");
  sigma->add_flag("--confirm", confirm, "Repeat the solve at h/2 and report the difference");

  auto* sandwich = app.add_subcommand("sandwich", "1 - I1 <= sigma(u) <= 1 - I1 + I2");
  kernel.add_to(sandwich);
  sandwich->add_option("--u", u)->required();
  sandwich->add_option("--h", h, "Grid step (defaults to --grid-h)");

  u64 lo = 3, hi = 3, cap = std::numeric_limits<u64>::max();
  SweepIo io;
  auto* t1 = app.add_subcommand("sweep-t1", "n_k(p) / E(p) over a prime range");
  t1->add_option("--lo", lo)->required();
  t1->add_option("--hi", hi)->required();
  auto* o_k = t1->add_option("--k", k, "Fixed k");
  auto* o_kmax = t1->add_flag("--kmax", "k = min(floor(Kmax), cap, (p-1)/2)")->excludes(o_k);
  t1->add_option("--cap", cap);
  io.add_to(t1);

  std::string eps_text = "xi";
  auto* t2 = app.add_subcommand("sweep-t2", "Symbol counts up to the density threshold");
  t2->add_option("--lo", lo)->required();
  t2->add_option("--hi", hi)->required();
  t2->add_option("--eps", eps_text, "Exponent in (0, xi]; 'xi' for the endpoint");
  t2->add_option("--c", c);
  io.add_to(t2);

  auto* tm = app.add_subcommand("sweep-mchin", "Scaled mean values at the threshold");
  tm->add_option("--lo", lo)->required();
  tm->add_option("--hi", hi)->required();
  tm->add_option("--c", c);
  io.add_to(tm);

  auto* gauss = app.add_subcommand("gauss", "n1(p) < 2 sqrt(p) + 1 for every p = 1 mod 8 in a range");
  gauss->add_option("--lo", lo)->required();
  gauss->add_option("--hi", hi)->required();

  u64 nn = 0;
  auto* decompose = app.add_subcommand("decompose", "Nonresidue n = q m with q a prime nonresidue");
  add_p(decompose);
  decompose->add_option("--n", nn)->required();

  auto* counting = app.add_subcommand("check-counting", "Lower bound for sum_{n<=x} (n|p) below n1^3");
  add_p(counting);
  counting->add_option("--x", x)->required();

  double C = 1.0;
  auto* cases = app.add_subcommand("case-report", "Case analysis for n_k(p)");
  add_p(cases);
  cases->add_option("--k", k)->required();
  cases->add_option("--C", C);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg = config_from_environment();
    if (*o_cache) cfg.cache_dir = cache_dir;
    if (*o_seg) cfg.segment_size = segment_size;
    if (*o_qt) cfg.quad_tol = quad_tol;
    if (*o_h) cfg.grid_h = grid_h;
    if (*o_wb) cfg.work_budget = work_budget;
    if (*o_seed) cfg.seed = seed;
    if (*o_thr) cfg.threads = threads;
    validate(cfg);
    const SieveOptions sieve{cfg.segment_size};
    const SweepOptions sweep{cfg.threads, cfg.work_budget};

    if (*symbol) {
      out << legendre(n, OddPrime(p)).value() << '\n';
    } else if (*nonres) {
      out << nth_nonresidue(OddPrime(p), k) << '\n';
    } else if (*table) {
      const OddPrime q(p);
      const auto t = no_cache ? nonresidue_table(q, limit) : load_or_build_table(cfg.cache_dir, q, limit);
      out << fmt::format("p={} limit={} residues={} nonresidues={} zeros={}\n", p, limit, t.residue_count,
                         t.nonresidue_count, limit / p);
      if (list) {
        for (u64 v : t.nonresidues) out << v << '\n';
      }
    } else if (*sum) {
      out << char_sum(OddPrime(p), M, N, {i64{1} << 16, cfg.threads}).value << '\n';
    } else if (*mean) {
      out << fmt::format("{:.17g}\n", mean_value(OddPrime(p), x, {i64{1} << 16, cfg.threads}));
    } else if (*burgess) {
      const OddPrime q(p);
      if (*o_auto) {
        const auto best = best_burgess_r(q, N, r_max);
        out << fmt::format("r={} rhs={:.17g}\n", best.r, best.rhs);
      } else {
        out << fmt::format("r={} rhs={:.17g}\n", r, burgess_rhs(q, N, r).rhs);
      }
      if (audit > 0) {
        const std::vector<i64> rs{1, 2, 3};
        const auto a = burgess_audit(PeriodTable(q), rs, audit, cfg.seed);
        out << fmt::format("audit seed={} windows={} violations={} max_ratio={:.17g}\n", a.seed, a.windows,
                           a.violations, a.max_ratio);
        if (a.violations > 0) return kVerificationFailed;
      }
    } else if (*mchin) {
      const OddPrime q(p);
      try {
        out << "r\t" << mchin_r_choice(q, c) << '\n';
      } catch (const Error& e) {
        if (e.code() != Errc::out_of_range || c <= 0.0 || c > std::cbrt(q.log())) throw;
        out << "r\tdegenerate\n";
      }
      out << fmt::format("threshold\t{:.17g}\nbound\t{:.17g}\n", mchin_threshold(q, c), mchin_bound(q, c));
    } else if (*consts) {
      const auto k0 = constants(cfg.quad_tol);
      out << fmt::format("lambda\t{:.12f}\neta\t{:.12f}\nxi\t{:.12f}\ndelta1\t{:.12f}\n", k0.lambda, k0.eta, k0.xi,
                         k0.delta1);
      out << fmt::format("residual xi-eta(1-lambda)\t{:.3e}\nresidual xi-(2lambda-1)\t{:.3e}\n",
                         std::abs(k0.xi - k0.eta * (1.0 - k0.lambda)), std::abs(k0.xi - (2.0 * k0.lambda - 1.0)));
    } else if (*d1) {
      out << fmt::format("{:.12f}\n", delta1_compute(tol > 0.0 ? tol : cfg.quad_tol));
    } else if (*sigma) {
      const double step = h > 0.0 ? h : cfg.grid_h;
      const auto kern = kernel.build(U, cfg);
      const auto grid = sigma_solve(kern, U, step);
      const auto lo_u = std::min(1.0, grid.U);
      const auto m = sigma_minimum(grid, lo_u, grid.U);
      out << fmt::format("h\t{:.17g}\npoints\t{}\nmin_u\t{:.12f}\nmin_sigma\t{:.12f}\n", grid.h, grid.values.size(),
                         m.u, m.value);
      if (confirm) {
        const auto fine = sigma_minimum(sigma_solve(kern, U, step / 2), lo_u, grid.U);
        out << fmt::format("min_sigma_h/2\t{:.12f}\nmin_change\t{:.3e}\n", fine.value, std::abs(fine.value - m.value));
      }
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        require(static_cast<bool>(f), Errc::io, "cannot open " + out_path);
        write_tsv(grid, f);
      }
    } else if (*sandwich) {
      const double step = h > 0.0 ? h : cfg.grid_h;
      const auto s = sandwich_check(kernel.build(std::max(u, 1.0) + 1e-9, cfg), u, step, cfg.quad_tol);
      out << fmt::format("lower\t{:.12f}\nsigma\t{:.12f}\nupper\t{:.12f}\nI1\t{:.12f}\nI2\t{:.12f}\n", s.lower,
                         s.sigma, s.upper, s.i1, s.i2);
    } else if (*t1) {
      const auto policy = *o_kmax ? KPolicy::kmax() : KPolicy::fixed(*o_k ? k : 1);
      const auto res = theorem1_sweep(primes_in(lo, hi, sieve), policy, cap, sweep);
      emit_rows(res.records, io);
      out << "rows\t" << res.records.size() << "\nargmax_p\t" << res.argmax_p << '\n';
      return finish_sweep({{"t1.max_ratio", res.max_ratio}}, res.skipped, io, true, out, err);
    } else if (*t2) {
      const auto res = theorem2_sweep(primes_in(lo, hi, sieve), parse_eps(eps_text), c, sweep);
      emit_rows(res.rows, io);
      out << "rows\t" << res.rows.size() << "\nargmin_p\t" << res.argmin_p << '\n';
      if (!res.all_fork_ok) err << "reconstruction bound violated on at least one row\n";
      return finish_sweep({{"t2.min_normalized", res.min_normalized}}, res.skipped, io, res.all_fork_ok, out, err);
    } else if (*tm) {
      const auto res = mchin_sweep(primes_in(lo, hi, sieve), c, sweep);
      emit_rows(res.rows, io);
      out << "rows\t" << res.rows.size() << "\nargmax_p\t" << res.argmax_p << '\n';
      return finish_sweep({{"mchin.max_scaled", res.max_scaled}}, res.skipped, io, true, out, err);
    } else if (*gauss) {
      std::size_t checked = 0, failures = 0;
      for (u64 q : primes_in(lo, hi, sieve)) {
        if (q % 8 != 1) continue;
        ++checked;
        if (!gauss_check(OddPrime(q))) {
          ++failures;
          err << "gauss bound fails at p=" << q << '\n';
        }
      }
      out << "checked\t" << checked << "\nfailures\t" << failures << '\n';
      if (failures > 0) return kVerificationFailed;
    } else if (*decompose) {
      const auto d = vinogradov_decompose(nn, OddPrime(p));
      out << fmt::format("{} = {} * {}\n", d.n, d.q, d.m);
    } else if (*counting) {
      const auto chk = counting_inequality_check(OddPrime(p), x);
      out << fmt::format("lhs\t{}\nrhs\t{:.12f}\nok\t{}\n", chk.lhs, chk.rhs, chk.ok);
      if (!chk.ok) return kVerificationFailed;
    } else if (*cases) {
      const auto rep = case_analysis_report(OddPrime(p), k, C);
      out << fmt::format("branch\t{}\nn1\t{}\nnk\t{}\nE\t{:.12g}\nB\t{:.12g}\nk_limit\t{:.12g}\nk_within_limit\t{}\n",
                         to_string(rep.branch), rep.n1, rep.nk, rep.E, rep.B, rep.k_limit, rep.k_within_limit);
      out << fmt::format("nonresidues_in_2k\t{}\nrealized_bound\t{:.12g}\nbound_holds\t{}\n", rep.nonresidues_in_2k,
                         rep.realized_bound, rep.bound_holds);
      if (!rep.witnesses.empty()) out << fmt::format("witnesses\t{}\n", fmt::join(rep.witnesses, " "));
      if (rep.branch == CaseBranch::large_n1) {
        out << fmt::format("x_choice\t{:.12g}\nx_in_window\t{}\n", rep.x_choice, rep.x_in_window);
      }
      if (!rep.notes.empty()) out << "notes\t" << rep.notes << '\n';
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case Errc::verification_failed: return kVerificationFailed;
      case Errc::budget_exhausted: return kBudgetExhausted;
      default: return kUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace nrlab::cli
