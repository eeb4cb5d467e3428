#include "nrlab/report.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include "json.hpp"

namespace nrlab {

namespace {

std::string num(double v) { return fmt::format("{}", v); }
std::string num(u64 v) { return std::to_string(v); }
std::string num(bool v) { return v ? "true" : "false"; }

u64 to_u64(const std::string& s) {
  u64 v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc{} && end == s.data() + s.size() && !s.empty(), Errc::io, "bad integer field '" + s + "'");
  return v;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(!s.empty() && end == s.c_str() + s.size(), Errc::io, "bad real field '" + s + "'");
  return v;
}

bool to_bool(const std::string& s) {
  require(s == "true" || s == "false", Errc::io, "bad boolean field '" + s + "'");
  return s == "true";
}

void check_width(const CsvRow& f, std::size_t n) {
  require(f.size() == n, Errc::io, fmt::format("csv row has {} fields, expected {}", f.size(), n));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& Columns<BoundRecord>::header() {
  static const std::vector<std::string> h{"p", "n1", "k", "nk", "E", "ratio", "count_plus", "count_minus", "notes"};
  return h;
}

CsvRow Columns<BoundRecord>::fields(const BoundRecord& r) {
  return {num(r.p),     num(r.n1),         num(r.k),           num(r.nk), num(r.E),
          num(r.ratio), num(r.count_plus), num(r.count_minus), r.notes};
}

BoundRecord Columns<BoundRecord>::parse(const CsvRow& f) {
  check_width(f, 9);
  return {to_u64(f[0]),    to_u64(f[1]), to_u64(f[2]), to_u64(f[3]), to_double(f[4]),
          to_double(f[5]), to_u64(f[6]), to_u64(f[7]), f[8]};
}

const std::vector<std::string>& Columns<Theorem2Row>::header() {
  static const std::vector<std::string> h{"p",    "y",          "count_plus",    "count_minus", "normalized_plus",
                                          "normalized_minus", "mean", "fork_residual", "fork_ok"};
  return h;
}

CsvRow Columns<Theorem2Row>::fields(const Theorem2Row& r) {
  return {num(r.p),
          num(r.y),
          num(r.count_plus),
          num(r.count_minus),
          num(r.normalized_plus),
          num(r.normalized_minus),
          num(r.mean),
          num(r.fork_residual),
          num(r.fork_ok)};
}

Theorem2Row Columns<Theorem2Row>::parse(const CsvRow& f) {
  check_width(f, 9);
  return {to_u64(f[0]),    to_u64(f[1]),    to_u64(f[2]),    to_u64(f[3]), to_double(f[4]),
          to_double(f[5]), to_double(f[6]), to_double(f[7]), to_bool(f[8])};
}

const std::vector<std::string>& Columns<MchinRow>::header() {
  static const std::vector<std::string> h{"p", "x0", "mean_abs", "scaled"};
  return h;
}

CsvRow Columns<MchinRow>::fields(const MchinRow& r) {
  return {num(r.p), num(r.x0), num(r.mean_abs), num(r.scaled)};
}

MchinRow Columns<MchinRow>::parse(const CsvRow& f) {
  check_width(f, 4);
  return {to_u64(f[0]), to_u64(f[1]), to_double(f[2]), to_double(f[3])};
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const CsvRow& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(row[i]);
  }
  out << '\n';
}

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  CsvRow row;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && in.peek() == '\n') in.get(c);
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  require(!quoted, Errc::io, "parse_csv: unterminated quoted field");
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

nlohmann::ordered_json to_json(const BoundRecord& r) {
  return {{"p", r.p},         {"n1", r.n1},     {"k", r.k},
          {"nk", r.nk},       {"E", r.E},       {"ratio", r.ratio},
          {"count_plus", r.count_plus}, {"count_minus", r.count_minus}, {"notes", r.notes}};
}

nlohmann::ordered_json to_json(const Theorem2Row& r) {
  return {{"p", r.p},
          {"y", r.y},
          {"count_plus", r.count_plus},
          {"count_minus", r.count_minus},
          {"normalized_plus", r.normalized_plus},
          {"normalized_minus", r.normalized_minus},
          {"mean", r.mean},
          {"fork_residual", r.fork_residual},
          {"fork_ok", r.fork_ok}};
}

nlohmann::ordered_json to_json(const MchinRow& r) {
  return {{"p", r.p}, {"x0", r.x0}, {"mean_abs", r.mean_abs}, {"scaled", r.scaled}};
}

}  // namespace

template <class Row>
void write_json(std::ostream& out, const std::vector<Row>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  out << arr.dump(2) << '\n';
}

template void write_json<BoundRecord>(std::ostream&, const std::vector<BoundRecord>&);
template void write_json<Theorem2Row>(std::ostream&, const std::vector<Theorem2Row>&);
template void write_json<MchinRow>(std::ostream&, const std::vector<MchinRow>&);

// ---------------------------------------------------------------------------

std::string lock_render(double v) { return fmt::format("{:.12g}", v); }

void write_lock(const std::filesystem::path& path, const LockStats& stats) {
  std::ofstream out(path);
  require(static_cast<bool>(out), Errc::io, "write_lock: cannot open " + path.string());
  for (const auto& [name, v] : stats) out << name << '\t' << lock_render(v) << '\n';
}

std::map<std::string, std::string> read_lock(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::io, "read_lock: cannot open " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    require(tab != std::string::npos, Errc::io, "read_lock: malformed line '" + line + "'");
    out[line.substr(0, tab)] = trim(line.substr(tab + 1));
  }
  return out;
}

std::vector<std::string> check_lock(const std::filesystem::path& path, const LockStats& stats) {
  const auto locked = read_lock(path);
  std::vector<std::string> problems;
  for (const auto& [name, v] : stats) {
    const auto it = locked.find(name);
    if (it == locked.end()) {
      problems.push_back(name + ": not present in lock file");
    } else if (it->second != lock_render(v)) {
      problems.push_back(fmt::format("{}: locked {} but computed {}", name, it->second, lock_render(v)));
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------

std::filesystem::path cache_path(const std::filesystem::path& dir, u64 p, u64 limit) {
  return dir / fmt::format("nonresidues_{}_{}.txt", p, limit);
}

void write_table_cache(const std::filesystem::path& dir, const NonresidueTable& table) {
  std::filesystem::create_directories(dir);
  const auto path = cache_path(dir, table.p.value(), table.limit);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    require(static_cast<bool>(out), Errc::io, "write_table_cache: cannot open " + tmp);
    out << fmt::format("nrlab-nonresidues\t1\t{}\t{}\t{}\n", table.p.value(), table.limit, table.nonresidues.size());
    for (u64 n : table.nonresidues) out << n << '\n';
    require(static_cast<bool>(out), Errc::io, "write_table_cache: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<NonresidueTable> read_table_cache(const std::filesystem::path& dir, const OddPrime& p, u64 limit) {
  std::ifstream in(cache_path(dir, p.value(), limit));
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  std::istringstream head(line);
  std::string magic;
  u64 version = 0, hp = 0, hlimit = 0, count = 0;
  head >> magic >> version >> hp >> hlimit >> count;
  if (!head || magic != "nrlab-nonresidues" || version != 1 || hp != p.value() || hlimit != limit) return std::nullopt;

  NonresidueTable t{p, limit, {}, 0, 0};
  t.nonresidues.reserve(count);
  u64 prev = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const u64 n = to_u64(line);
    require(n > prev && n <= limit, Errc::io, "read_table_cache: entries out of order in cache file");
    t.nonresidues.push_back(n);
    prev = n;
  }
  require(t.nonresidues.size() == count, Errc::io, "read_table_cache: count mismatch in cache file");
  t.nonresidue_count = count;
  t.residue_count = limit - limit / p.value() - count;
  return t;
}

NonresidueTable load_or_build_table(const std::filesystem::path& dir, const OddPrime& p, u64 limit) {
  if (auto cached = read_table_cache(dir, p, limit)) return std::move(*cached);
  auto t = nonresidue_table(p, limit);
  write_table_cache(dir, t);
  return t;
}

// ---------------------------------------------------------------------------

void apply_config_line(Config& cfg, const std::string& key, const std::string& value) {
  if (key == "cache_dir") {
    cfg.cache_dir = value;
  } else if (key == "segment_size") {
    cfg.segment_size = static_cast<std::size_t>(to_u64(value));
  } else if (key == "quad_tol") {
    cfg.quad_tol = to_double(value);
  } else if (key == "grid_h") {
    cfg.grid_h = to_double(value);
  } else if (key == "work_budget") {
    cfg.work_budget = to_u64(value);
  } else if (key == "seed") {
    cfg.seed = to_u64(value);
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(to_u64(value));
  } else {
    fail(Errc::invalid_argument, "unknown config key '" + key + "'");
  }
}

void load_config_file(Config& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), Errc::io, "cannot read config file " + path.string());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, Errc::invalid_argument,
            fmt::format("{}:{}: expected key=value", path.string(), lineno));
    apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

Config config_from_environment() {
  Config cfg;
  if (const char* file = std::getenv("NRLAB_CONFIG"); file && *file) load_config_file(cfg, file);
  if (const char* cache = std::getenv("NRLAB_CACHE"); cache && *cache) cfg.cache_dir = cache;
  return cfg;
}

void validate(const Config& cfg) {
  require(cfg.segment_size >= 64, Errc::invalid_argument, "config: segment_size must be >= 64");
  require(cfg.quad_tol > 0.0 && cfg.quad_tol <= 1e-4, Errc::invalid_argument, "config: quad_tol must lie in (0, 1e-4]");
  require(cfg.grid_h > 0.0 && cfg.grid_h <= 1e-2, Errc::invalid_argument, "config: grid_h must lie in (0, 1e-2]");
  require(cfg.work_budget > 0, Errc::invalid_argument, "config: work_budget must be positive");
  require(cfg.seed > 0, Errc::invalid_argument, "config: seed must be positive");
  require(!cfg.cache_dir.empty(), Errc::invalid_argument, "config: cache_dir must be set");
}

}  // namespace nrlab
