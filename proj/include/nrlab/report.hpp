#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nrlab/experiments.hpp"
#include "nrlab/residues.hpp"

namespace nrlab {

// ---------------------------------------------------------------------------
// CSV (RFC 4180 quoting) and JSON emission for sweep rows.
//
// Column order is fixed per row type:
//   BoundRecord : p,n1,k,nk,E,ratio,count_plus,count_minus,notes
//   Theorem2Row : p,y,count_plus,count_minus,normalized_plus,normalized_minus,mean,fork_residual,fork_ok
//   MchinRow    : p,x0,mean_abs,scaled
// Reals are written in shortest round-trip form.

using CsvRow = std::vector<std::string>;

template <class Row>
struct Columns;

template <>
struct Columns<BoundRecord> {
  static const std::vector<std::string>& header();
  static CsvRow fields(const BoundRecord& r);
  static BoundRecord parse(const CsvRow& f);
};

template <>
struct Columns<Theorem2Row> {
  static const std::vector<std::string>& header();
  static CsvRow fields(const Theorem2Row& r);
  static Theorem2Row parse(const CsvRow& f);
};

template <>
struct Columns<MchinRow> {
  static const std::vector<std::string>& header();
  static CsvRow fields(const MchinRow& r);
  static MchinRow parse(const CsvRow& f);
};

std::string csv_escape(const std::string& field);
void write_csv_row(std::ostream& out, const CsvRow& row);
std::vector<CsvRow> parse_csv(std::istream& in);

template <class Row>
void write_csv(std::ostream& out, const std::vector<Row>& rows) {
  write_csv_row(out, Columns<Row>::header());
  for (const auto& r : rows) write_csv_row(out, Columns<Row>::fields(r));
}

template <class Row>
std::vector<Row> read_csv(std::istream& in) {
  auto table = parse_csv(in);
  require(!table.empty() && table.front() == Columns<Row>::header(), Errc::io, "read_csv: header mismatch");
  std::vector<Row> out;
  for (std::size_t i = 1; i < table.size(); ++i) out.push_back(Columns<Row>::parse(table[i]));
  return out;
}

/// JSON array of flat objects keyed by the CSV header.
template <class Row>
void write_json(std::ostream& out, const std::vector<Row>& rows);

// ---------------------------------------------------------------------------
// Regression locks: one "name<TAB>value" line per statistic, values rendered
// with 12 significant digits.

using LockStats = std::map<std::string, double>;

std::string lock_render(double v);
void write_lock(const std::filesystem::path& path, const LockStats& stats);
std::map<std::string, std::string> read_lock(const std::filesystem::path& path);
/// Human-readable mismatches; empty when every statistic reproduces.
std::vector<std::string> check_lock(const std::filesystem::path& path, const LockStats& stats);

// ---------------------------------------------------------------------------
// Nonresidue table cache: one file per (p, limit). First line
//   nrlab-nonresidues<TAB>1<TAB>p<TAB>limit<TAB>count
// followed by the nonresidues in ascending order, one per line.

std::filesystem::path cache_path(const std::filesystem::path& dir, u64 p, u64 limit);
void write_table_cache(const std::filesystem::path& dir, const NonresidueTable& table);
std::optional<NonresidueTable> read_table_cache(const std::filesystem::path& dir, const OddPrime& p, u64 limit);
NonresidueTable load_or_build_table(const std::filesystem::path& dir, const OddPrime& p, u64 limit);

// ---------------------------------------------------------------------------
// Configuration: defaults < NRLAB_CONFIG key=value file < NRLAB_CACHE < flags.

struct Config {
  std::filesystem::path cache_dir = ".nrlab-cache";
  std::size_t segment_size = std::size_t{1} << 20;
  double quad_tol = 1e-8;
  double grid_h = 1e-3;
  u64 work_budget = 100'000'000;
  u64 seed = 20240917;
  unsigned threads = 0;
};

void apply_config_line(Config& cfg, const std::string& key, const std::string& value);
void load_config_file(Config& cfg, const std::filesystem::path& path);
/// Reads NRLAB_CONFIG and NRLAB_CACHE on top of the defaults.
Config config_from_environment();
void validate(const Config& cfg);

}  // namespace nrlab
