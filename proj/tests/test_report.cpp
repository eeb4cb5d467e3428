#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

#include "json.hpp"
#include "nrlab/report.hpp"

using namespace nrlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nrlab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("csv_escape") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_escape("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("parse_csv handles quoting") {
  std::istringstream in("a,\"b,c\",\"d\"\"e\"\r\n\"multi\nline\",x,\n");
  const auto rows = parse_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == CsvRow{"a", "b,c", "d\"e"});
  CHECK(rows[1] == CsvRow{"multi\nline", "x", ""});
  std::istringstream bad("\"open,field\n");
  CHECK_THROWS_AS(parse_csv(bad), Error);
}

TEST_CASE("BoundRecord CSV round trip is exact") {
  const auto sweep = theorem1_sweep(primes_in(3, 3000), KPolicy::kmax(), 20, {1});
  std::vector<BoundRecord> rows = sweep.records;
  rows.front().notes = "comma, \"quote\"";
  rows.back().ratio = 0.1 + 0.2;  // needs all 17 digits
  std::stringstream buf;
  write_csv(buf, rows);
  CHECK(buf.str().rfind("p,n1,k,nk,E,ratio,count_plus,count_minus,notes\n", 0) == 0);
  CHECK(read_csv<BoundRecord>(buf) == rows);
}

TEST_CASE("Theorem2Row and MchinRow CSV round trips are exact") {
  const auto t2 = theorem2_sweep(primes_in(3, 500), 0.04, 1.0, {1});
  std::stringstream b2;
  write_csv(b2, t2.rows);
  CHECK(read_csv<Theorem2Row>(b2) == t2.rows);

  const auto mc = mchin_sweep(primes_in(17, 2000), 1.0, {1});
  std::stringstream b3;
  write_csv(b3, mc.rows);
  CHECK(b3.str().rfind("p,x0,mean_abs,scaled\n", 0) == 0);
  CHECK(read_csv<MchinRow>(b3) == mc.rows);

  std::stringstream wrong("p,x0\n1,2\n");
  CHECK_THROWS_AS(read_csv<MchinRow>(wrong), Error);
  std::stringstream short_row("p,x0,mean_abs,scaled\n1,2,3\n");
  CHECK_THROWS_AS(read_csv<MchinRow>(short_row), Error);
}

TEST_CASE("JSON keys match the CSV header") {
  const auto mc = mchin_sweep(primes_in(17, 100), 1.0, {1});
  std::stringstream buf;
  write_json(buf, mc.rows);
  const auto j = nlohmann::json::parse(buf.str());
  REQUIRE(j.is_array());
  REQUIRE(j.size() == mc.rows.size());
  const auto first = nlohmann::ordered_json::parse(buf.str())[0];
  std::vector<std::string> keys;
  for (auto it = first.begin(); it != first.end(); ++it) keys.push_back(it.key());
  CHECK(keys == Columns<MchinRow>::header());
  CHECK(j[0]["scaled"].get<double>() == mc.rows[0].scaled);
}

TEST_CASE("locks") {
  const auto dir = scratch_dir("lock");
  const auto path = dir / "stats.lock";
  CHECK(lock_render(1.0 / 3.0) == "0.333333333333");
  CHECK(lock_render(2.0) == "2");
  write_lock(path, {{"a", 1.0 / 3.0}, {"b", 12345.678901234567}});
  const auto m = read_lock(path);
  CHECK(m.at("a") == "0.333333333333");
  CHECK(m.at("b") == "12345.6789012");
  CHECK(check_lock(path, {{"a", 1.0 / 3.0 + 1e-15}}).empty());
  CHECK(check_lock(path, {{"a", 0.3333333334}}).size() == 1);
  CHECK(check_lock(path, {{"c", 1.0}}).size() == 1);
  CHECK_THROWS_AS(read_lock(dir / "missing.lock"), Error);
  fs::remove_all(dir);
}

TEST_CASE("nonresidue cache: reload equality on random pairs") {
  const auto dir = scratch_dir("cache");
  std::mt19937_64 rng(31);
  const auto primes = primes_in(3, 50000);
  for (int i = 0; i < 50; ++i) {
    const OddPrime p(primes.primes[rng() % primes.size()]);
    const u64 limit = 1 + rng() % 5000;
    const auto built = load_or_build_table(dir, p, limit);
    CHECK(fs::exists(cache_path(dir, p.value(), limit)));
    const auto again = read_table_cache(dir, p, limit);
    REQUIRE(again.has_value());
    CHECK(*again == built);
    CHECK(*again == nonresidue_table(p, limit));
  }
  CHECK_FALSE(read_table_cache(dir, OddPrime(7), 999999).has_value());
  fs::remove_all(dir);
}

TEST_CASE("nonresidue cache: corrupt files are rejected") {
  const auto dir = scratch_dir("corrupt");
  write_table_cache(dir, nonresidue_table(OddPrime(7), 20));
  const auto path = cache_path(dir, 7, 20);
  {
    std::ofstream out(path);
    out << "nrlab-nonresidues\t1\t7\t20\t3\n5\n3\n6\n";
  }
  CHECK_THROWS_AS(read_table_cache(dir, OddPrime(7), 20), Error);
  {
    std::ofstream out(path);
    out << "something-else\n";
  }
  CHECK_FALSE(read_table_cache(dir, OddPrime(7), 20).has_value());
  CHECK(load_or_build_table(dir, OddPrime(7), 20) == nonresidue_table(OddPrime(7), 20));
  fs::remove_all(dir);
}

TEST_CASE("config file and validation") {
  const auto dir = scratch_dir("config");
  const auto path = dir / "nrlab.conf";
  {
    std::ofstream out(path);
    out << "# comment\n  quad_tol = 1e-9  \nseed=7 # trailing\n\nthreads = 2\n";
  }
  Config cfg;
  load_config_file(cfg, path);
  CHECK(cfg.quad_tol == 1e-9);
  CHECK(cfg.seed == 7);
  CHECK(cfg.threads == 2);
  CHECK(cfg.grid_h == 1e-3);
  CHECK_NOTHROW(validate(cfg));

  CHECK_THROWS_AS(apply_config_line(cfg, "nope", "1"), Error);
  CHECK_THROWS_AS(apply_config_line(cfg, "seed", "x"), Error);
  Config bad;
  bad.grid_h = 0.5;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = Config{};
  bad.quad_tol = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);

  ::setenv("NRLAB_CONFIG", path.c_str(), 1);
  ::setenv("NRLAB_CACHE", (dir / "cache").c_str(), 1);
  const Config env = config_from_environment();
  CHECK(env.seed == 7);
  CHECK(env.cache_dir == dir / "cache");
  ::unsetenv("NRLAB_CONFIG");
  ::unsetenv("NRLAB_CACHE");
  CHECK(config_from_environment().seed == Config{}.seed);
  fs::remove_all(dir);
}
