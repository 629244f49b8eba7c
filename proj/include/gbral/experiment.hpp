#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "gbral/blackbox_tree_oracle.hpp"
#include "gbral/equivalence_check.hpp"
#include "gbral/equivalence_oracles.hpp"
#include "gbral/learner.hpp"
#include "gbral/sut.hpp"
#include "gbral/tainted_tree_oracle.hpp"

namespace gbral {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class TreeOracleKind { Tainted, Blackbox };
enum class EqOracleKind { Tainted, Normal };

struct OracleConfig {
  TreeOracleKind tree = TreeOracleKind::Tainted;
  EqOracleKind eq = EqOracleKind::Tainted;

  std::string label() const {
    return std::string(tree == TreeOracleKind::Tainted ? "TTO" : "NTO") + "+" +
           (eq == EqOracleKind::Tainted ? "TEO" : "NEO");
  }
  friend bool operator==(const OracleConfig&, const OracleConfig&) = default;
};

// "tto+teo", "NTO+NEO", ... in any case.
inline OracleConfig parse_oracles(std::string text) {
  for (auto& ch : text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto plus = text.find('+');
  if (plus == std::string::npos) throw ConfigError("oracle configuration must look like tto+teo: " + text);
  std::string t = text.substr(0, plus), e = text.substr(plus + 1);
  OracleConfig out;
  if (t == "tto")
    out.tree = TreeOracleKind::Tainted;
  else if (t == "nto")
    out.tree = TreeOracleKind::Blackbox;
  else
    throw ConfigError("unknown tree oracle '" + t + "' (tto or nto)");
  if (e == "teo")
    out.eq = EqOracleKind::Tainted;
  else if (e == "neo")
    out.eq = EqOracleKind::Normal;
  else
    throw ConfigError("unknown equivalence oracle '" + e + "' (teo or neo)");
  return out;
}

// Desk-scale defaults.
struct Budgets {
  Budget learning{1'000'000, 50'000};
  Budget testing{100'000, 500};  // per equivalence query
  std::size_t max_word_len = 20;
  std::chrono::milliseconds timeout{60'000};  // per tree or equivalence query
};

struct ExperimentConfig {
  std::string sut;
  OracleConfig oracles;
  std::uint64_t seed = 1;
  Budgets budgets;
  RandomWalkConfig random_walk;
  TaintedEqConfig tainted_eq;
  LearnerConfig learner;
  std::size_t validation_depth = 6;
  bool record_transcript = false;
};

enum class Outcome { Learned, BudgetExhausted, Timeout, Crashed };

inline std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Learned: return "learned";
    case Outcome::BudgetExhausted: return "budget-exhausted";
    case Outcome::Timeout: return "timeout";
    case Outcome::Crashed: return "crashed";
  }
  return "?";
}

// symbols = inputs + resets, over both phases.
struct MetricsRecord {
  std::string sut;
  std::string oracles;
  std::uint64_t seed = 0;
  Outcome outcome = Outcome::BudgetExhausted;
  std::uint64_t inputs = 0;
  std::uint64_t resets = 0;
  std::uint64_t symbols = 0;
  std::uint64_t learning_symbols = 0;
  std::uint64_t testing_symbols = 0;
  std::size_t rounds = 0;
  std::size_t locations = 0;
  double wall_ms = 0;
  std::string error;
};

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"sut",     "oracles",          "seed",            "outcome",
                                             "inputs",  "resets",           "symbols",         "learning_symbols",
                                             "testing_symbols", "rounds", "locations",       "wall_ms"};
  return cols;
}

inline std::string csv_header(bool wall_time = true) {
  std::string out;
  for (const auto& c : csv_columns()) {
    if (c == "wall_ms" && !wall_time) continue;
    out += (out.empty() ? "" : ",") + c;
  }
  return out;
}

// RFC 4180 quoting; lock ids contain commas.
inline std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char ch : f) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::string csv_row(const MetricsRecord& m, bool wall_time = true) {
  std::ostringstream os;
  os << csv_field(m.sut) << ',' << m.oracles << ',' << m.seed << ',' << to_string(m.outcome) << ',' << m.inputs << ','
     << m.resets << ',' << m.symbols << ',' << m.learning_symbols << ',' << m.testing_symbols << ',' << m.rounds
     << ',' << m.locations;
  if (wall_time) os << ',' << std::fixed << std::setprecision(1) << m.wall_ms;
  return os.str();
}

struct ExperimentResult {
  MetricsRecord metrics;
  std::optional<RegisterAutomaton> model;  // last hypothesis, if any
  std::vector<SutSession::TranscriptEntry> transcript;  // only with cfg.record_transcript
};

namespace detail {

struct QueryClock {
  QueryClock(SutSession& s, std::chrono::milliseconds limit) : s_(s) { s_.start_query_clock(limit); }
  ~QueryClock() { s_.stop_query_clock(); }
  SutSession& s_;
};

}  // namespace detail

using HypothesisSink = std::function<void(const RegisterAutomaton&, std::size_t round)>;

// One learning run. Metrics are filled in whatever way the run ends; only
// exceptions outside the budget/timeout family escape (a crash).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const HypothesisSink& on_hypothesis = {}) {
  CatalogEntry entry = catalog(cfg.sut);  // throws UnknownSut before any query
  SutSession& s = entry.session;
  s.set_budget(Phase::Learning, cfg.budgets.learning);
  s.set_budget(Phase::Testing, cfg.budgets.testing);
  s.record_transcript(cfg.record_transcript);
  std::mt19937_64 rng(cfg.seed);

  RandomWalkConfig rw = cfg.random_walk;
  rw.max_len = cfg.budgets.max_word_len;
  const auto timeout = cfg.budgets.timeout;

  TreeOracle tree = [&](const TreeQuery& q) {
    s.set_phase(Phase::Learning);
    detail::QueryClock clock(s, timeout);
    return cfg.oracles.tree == TreeOracleKind::Tainted ? tree_query(q, s) : tree_query_blackbox(q, s);
  };
  EquivalenceOracle eq = [&](const RegisterAutomaton& h) {
    s.set_phase(Phase::Testing);
    s.restart_budget_window(Phase::Testing);
    EquivalenceVerdict v;
    {
      detail::QueryClock clock(s, timeout);
      v = cfg.oracles.eq == EqOracleKind::Tainted ? tainted_eq(h, s, cfg.tainted_eq, rng) : random_walk_eq(h, s, rw, rng);
    }
    s.set_phase(Phase::Learning);
    return v;
  };

  ExperimentResult out;
  MetricsRecord& m = out.metrics;
  m.sut = s.id();
  m.oracles = cfg.oracles.label();
  m.seed = cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();
  Learner learner(s, tree, cfg.learner);
  try {
    LearnResult r = learn(learner, eq, cfg.learner.max_rounds, [&](const RegisterAutomaton& h, std::size_t round) {
      out.model = h;
      m.rounds = round;
      if (on_hypothesis) on_hypothesis(h, round);
    });
    m.outcome = bounded_equivalent(r.hypothesis, entry.reference, cfg.validation_depth).equal ? Outcome::Learned
                                                                                             : Outcome::BudgetExhausted;
  } catch (const BudgetExhausted& e) {
    m.outcome = Outcome::BudgetExhausted;
    m.error = e.what();
  } catch (const NonConvergence& e) {
    m.outcome = Outcome::BudgetExhausted;
    m.error = e.what();
  } catch (const QueryTimeout& e) {
    m.outcome = Outcome::Timeout;
    m.error = e.what();
  }
  m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const Metrics total = s.metrics();
  m.inputs = total.inputs;
  m.resets = total.resets;
  m.symbols = total.symbols();
  m.learning_symbols = s.metrics(Phase::Learning).symbols();
  m.testing_symbols = s.metrics(Phase::Testing).symbols();
  if (out.model) m.locations = out.model->locations().size();
  out.transcript = s.transcript();
  return out;
}

// ---------------------------------------------------------------------------
// Grid files: a TOML subset (sections, key = value, strings, integers,
// floats, booleans, flat arrays; arrays may span lines; # comments).
//
//   [sut]      ids = ["fifo:1", "fifo:2"]
//   [oracles]  configs = ["tto+teo", "nto+neo"]
//   [seeds]    values = [1, 2, 3]   or   count = 5   (seeds 1..count)
//   [budgets]  learning_inputs, learning_resets, testing_inputs,
//              testing_resets, max_word_len, timeout_ms
//   [random_walk] reset_probability, reuse_probability, pool_size
//   [tainted_eq]  min_suffix_len, max_suffix_len, suffixes_per_length
//   [run]      jobs, validation_depth, max_rounds

using TomlScalar = std::variant<std::int64_t, double, bool, std::string>;
using TomlValue = std::variant<TomlScalar, std::vector<TomlScalar>>;
using TomlTable = std::map<std::string, std::map<std::string, TomlValue>>;

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Drops a # comment that is not inside a string.
inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline TomlScalar parse_toml_scalar(const std::string& raw, std::size_t line_no) {
  std::string t = trim(raw);
  auto fail = [&]() -> TomlScalar {
    throw ConfigError("grid line " + std::to_string(line_no) + ": cannot parse value '" + t + "'");
  };
  if (t.empty()) return fail();
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') return fail();
    return t.substr(1, t.size() - 2);
  }
  if (t == "true") return true;
  if (t == "false") return false;
  std::string digits;
  for (char ch : t)
    if (ch != '_') digits += ch;
  try {
    std::size_t used = 0;
    if (digits.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = std::stoll(digits, &used);
      if (used == digits.size()) return v;
    } else {
      double v = std::stod(digits, &used);
      if (used == digits.size()) return v;
    }
  } catch (const std::exception&) {
  }
  return fail();
}

inline std::vector<TomlScalar> parse_toml_array(const std::string& body, std::size_t line_no) {
  std::vector<TomlScalar> out;
  std::string cur;
  bool in_str = false;
  auto flush = [&] {
    if (!trim(cur).empty()) out.push_back(parse_toml_scalar(cur, line_no));
    cur.clear();
  };
  for (char ch : body) {
    if (ch == '"') in_str = !in_str;
    if (ch == ',' && !in_str)
      flush();
    else
      cur += ch;
  }
  flush();
  return out;
}

}  // namespace detail

inline TomlTable parse_toml(std::istream& in) {
  TomlTable out;
  std::string section, line, pending_key, pending;
  std::size_t line_no = 0, pending_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = detail::trim(detail::strip_comment(line));
    if (!pending_key.empty()) {
      pending += " " + t;
      if (t.find(']') == std::string::npos) continue;
      auto close = pending.rfind(']');
      out[section][pending_key] = detail::parse_toml_array(pending.substr(0, close), pending_line);
      pending_key.clear();
      continue;
    }
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("grid line " + std::to_string(line_no) + ": malformed section");
      section = detail::trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("grid line " + std::to_string(line_no) + ": expected key = value");
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    if (!val.empty() && val.front() == '[') {
      auto close = val.rfind(']');
      if (close == std::string::npos) {
        pending_key = key;
        pending = val.substr(1);
        pending_line = line_no;
        continue;
      }
      out[section][key] = detail::parse_toml_array(val.substr(1, close - 1), line_no);
    } else {
      out[section][key] = detail::parse_toml_scalar(val, line_no);
    }
  }
  if (!pending_key.empty()) throw ConfigError("grid: unterminated array for key '" + pending_key + "'");
  return out;
}

struct GridConfig {
  std::vector<std::string> suts;
  std::vector<OracleConfig> oracles;
  std::vector<std::uint64_t> seeds;
  ExperimentConfig base;  // budgets and oracle parameters shared by every cell
  std::size_t jobs = 1;

  std::vector<ExperimentConfig> cells() const {
    std::vector<ExperimentConfig> out;
    for (const auto& sut : suts)
      for (const auto& o : oracles)
        for (auto seed : seeds) {
          ExperimentConfig c = base;
          c.sut = sut;
          c.oracles = o;
          c.seed = seed;
          out.push_back(std::move(c));
        }
    return out;
  }
};

namespace detail {

inline std::int64_t toml_int(const TomlValue& v, const std::string& key) {
  if (auto s = std::get_if<TomlScalar>(&v))
    if (auto i = std::get_if<std::int64_t>(s)) return *i;
  throw ConfigError("grid: '" + key + "' must be an integer");
}

inline std::uint64_t toml_count(const TomlValue& v, const std::string& key) {
  auto i = toml_int(v, key);
  if (i < 0) throw ConfigError("grid: '" + key + "' must not be negative");
  return static_cast<std::uint64_t>(i);
}

inline double toml_number(const TomlValue& v, const std::string& key) {
  if (auto s = std::get_if<TomlScalar>(&v)) {
    if (auto d = std::get_if<double>(s)) return *d;
    if (auto i = std::get_if<std::int64_t>(s)) return static_cast<double>(*i);
  }
  throw ConfigError("grid: '" + key + "' must be a number");
}

inline std::vector<TomlScalar> toml_array(const TomlValue& v, const std::string& key) {
  if (auto a = std::get_if<std::vector<TomlScalar>>(&v)) return *a;
  throw ConfigError("grid: '" + key + "' must be an array");
}

inline std::string toml_string(const TomlScalar& s, const std::string& key) {
  if (auto str = std::get_if<std::string>(&s)) return *str;
  throw ConfigError("grid: entries of '" + key + "' must be strings");
}

}  // namespace detail

// Validates everything (SUT ids included) before any run starts.
inline GridConfig grid_from_toml(const TomlTable& t) {
  static const std::map<std::string, std::set<std::string>> known{
      {"sut", {"ids"}},
      {"oracles", {"configs"}},
      {"seeds", {"values", "count"}},
      {"budgets",
       {"learning_inputs", "learning_resets", "testing_inputs", "testing_resets", "max_word_len", "timeout_ms"}},
      {"random_walk", {"reset_probability", "reuse_probability", "pool_size"}},
      {"tainted_eq", {"min_suffix_len", "max_suffix_len", "suffixes_per_length"}},
      {"run", {"jobs", "validation_depth", "max_rounds"}},
  };
  for (const auto& [sec, kv] : t) {
    auto it = known.find(sec);
    if (it == known.end()) throw ConfigError("grid: unknown section [" + sec + "]");
    for (const auto& [k, v] : kv)
      if (!it->second.count(k)) throw ConfigError("grid: unknown key '" + k + "' in [" + sec + "]");
  }
  auto get = [&](const std::string& sec, const std::string& key) -> const TomlValue* {
    auto s = t.find(sec);
    if (s == t.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  };

  GridConfig g;
  if (auto v = get("sut", "ids"))
    for (const auto& s : detail::toml_array(*v, "ids")) {
      std::string id = detail::toml_string(s, "ids");
      parse_sut_id(id);
      g.suts.push_back(id);
    }
  if (auto v = get("oracles", "configs"))
    for (const auto& s : detail::toml_array(*v, "configs")) g.oracles.push_back(parse_oracles(detail::toml_string(s, "configs")));
  if (auto v = get("seeds", "values")) {
    for (const auto& s : detail::toml_array(*v, "values")) {
      auto i = std::get_if<std::int64_t>(&s);
      if (!i || *i < 0) throw ConfigError("grid: seeds must be non-negative integers");
      g.seeds.push_back(static_cast<std::uint64_t>(*i));
    }
  } else if (auto c = get("seeds", "count")) {
    for (std::uint64_t i = 1; i <= detail::toml_count(*c, "count"); ++i) g.seeds.push_back(i);
  }

  Budgets& b = g.base.budgets;
  if (auto v = get("budgets", "learning_inputs")) b.learning.inputs = detail::toml_count(*v, "learning_inputs");
  if (auto v = get("budgets", "learning_resets")) b.learning.resets = detail::toml_count(*v, "learning_resets");
  if (auto v = get("budgets", "testing_inputs")) b.testing.inputs = detail::toml_count(*v, "testing_inputs");
  if (auto v = get("budgets", "testing_resets")) b.testing.resets = detail::toml_count(*v, "testing_resets");
  if (auto v = get("budgets", "max_word_len")) b.max_word_len = detail::toml_count(*v, "max_word_len");
  if (auto v = get("budgets", "timeout_ms"))
    b.timeout = std::chrono::milliseconds(detail::toml_count(*v, "timeout_ms"));
  RandomWalkConfig& rw = g.base.random_walk;
  if (auto v = get("random_walk", "reset_probability")) rw.reset_probability = detail::toml_number(*v, "reset_probability");
  if (auto v = get("random_walk", "reuse_probability")) rw.reuse_probability = detail::toml_number(*v, "reuse_probability");
  if (auto v = get("random_walk", "pool_size")) rw.pool_size = detail::toml_count(*v, "pool_size");
  TaintedEqConfig& te = g.base.tainted_eq;
  if (auto v = get("tainted_eq", "min_suffix_len")) te.min_suffix_len = detail::toml_count(*v, "min_suffix_len");
  if (auto v = get("tainted_eq", "max_suffix_len")) te.max_suffix_len = detail::toml_count(*v, "max_suffix_len");
  if (auto v = get("tainted_eq", "suffixes_per_length"))
    te.suffixes_per_length = detail::toml_count(*v, "suffixes_per_length");
  if (auto v = get("run", "jobs")) g.jobs = std::max<std::size_t>(1, detail::toml_count(*v, "jobs"));
  if (auto v = get("run", "validation_depth")) g.base.validation_depth = detail::toml_count(*v, "validation_depth");
  if (auto v = get("run", "max_rounds")) g.base.learner.max_rounds = detail::toml_count(*v, "max_rounds");

  if (rw.reset_probability <= 0 || rw.reset_probability > 1)
    throw ConfigError("grid: reset_probability must lie in (0, 1]");
  if (rw.reuse_probability < 0 || rw.reuse_probability > 1)
    throw ConfigError("grid: reuse_probability must lie in [0, 1]");
  if (te.min_suffix_len == 0 || te.min_suffix_len > te.max_suffix_len)
    throw ConfigError("grid: need 1 <= min_suffix_len <= max_suffix_len");
  return g;
}

inline GridConfig load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file " + path);
  return grid_from_toml(parse_toml(in));
}

// ---------------------------------------------------------------------------
// Grid runs

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct SummaryRow {
  std::string sut;
  std::string oracles;
  std::size_t runs = 0;
  std::size_t learned = 0;
  double median_symbols = 0;
};

// Median symbols per (sut, oracle configuration), in first-seen order.
inline std::vector<SummaryRow> summarise(const std::vector<MetricsRecord>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::vector<double>> symbols;
  for (const auto& r : rows) {
    auto key = std::make_pair(r.sut, r.oracles);
    if (!symbols.count(key)) out.push_back({r.sut, r.oracles});
    symbols[key].push_back(static_cast<double>(r.symbols));
    auto& s = *std::find_if(out.begin(), out.end(), [&](const SummaryRow& x) { return x.sut == r.sut && x.oracles == r.oracles; });
    ++s.runs;
    s.learned += r.outcome == Outcome::Learned;
  }
  for (auto& s : out) s.median_symbols = median(symbols[{s.sut, s.oracles}]);
  return out;
}

// Summary lines share the CSV columns: seed holds "median", outcome holds
// "learned=<k>/<n>", symbols holds the median.
inline std::string csv_summary_row(const SummaryRow& s, bool wall_time = true) {
  std::ostringstream os;
  os << csv_field(s.sut) << ',' << s.oracles << ",median,learned=" << s.learned << '/' << s.runs << ",,," << s.median_symbols
     << ",,,,";
  if (wall_time) os << ',';
  return os.str();
}

// gnuplot block: one line per SUT, one column per oracle configuration.
inline void write_gnuplot_data(std::ostream& os, const std::vector<SummaryRow>& summary) {
  std::vector<std::string> suts, configs;
  std::map<std::pair<std::string, std::string>, double> med;
  for (const auto& s : summary) {
    if (std::find(suts.begin(), suts.end(), s.sut) == suts.end()) suts.push_back(s.sut);
    if (std::find(configs.begin(), configs.end(), s.oracles) == configs.end()) configs.push_back(s.oracles);
    med[{s.sut, s.oracles}] = s.median_symbols;
  }
  os << "# median symbols per run; plot with logscale y\n# index sut";
  for (const auto& c : configs) os << ' ' << c;
  os << '\n';
  for (std::size_t i = 0; i < suts.size(); ++i) {
    os << i << " \"" << suts[i] << '"';
    for (const auto& c : configs) {
      auto it = med.find({suts[i], c});
      if (it == med.end())
        os << " ?";
      else
        os << ' ' << it->second;
    }
    os << '\n';
  }
}

struct GridOptions {
  bool wall_time = true;
  const std::atomic<bool>* interrupt = nullptr;  // stop taking new cells once set
  std::function<void(const MetricsRecord&)> on_record;
};

struct GridResult {
  std::vector<MetricsRecord> rows;  // grid order; only completed cells
  std::size_t crashed = 0;
  bool interrupted = false;
};

// Runs every cell on `jobs` workers. Rows go to `csv` in grid order as soon
// as the preceding cells have finished, so an interrupted run keeps a valid
// prefix. Summary rows follow once all cells are done.
inline GridResult run_grid(const GridConfig& g, std::ostream& csv, const GridOptions& opt = {}) {
  const auto cells = g.cells();
  std::vector<std::optional<MetricsRecord>> done(cells.size());
  std::size_t next_out = 0;
  std::atomic<std::size_t> next_cell{0};
  std::mutex mu;
  GridResult out;

  csv << csv_header(opt.wall_time) << '\n' << std::flush;
  auto worker = [&] {
    for (;;) {
      if (opt.interrupt && opt.interrupt->load()) return;
      std::size_t i = next_cell++;
      if (i >= cells.size()) return;
      MetricsRecord rec;
      try {
        rec = run_experiment(cells[i]).metrics;
      } catch (const std::exception& e) {
        rec.sut = cells[i].sut;
        rec.oracles = cells[i].oracles.label();
        rec.seed = cells[i].seed;
        rec.outcome = Outcome::Crashed;
        rec.error = e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      if (opt.on_record) opt.on_record(rec);
      done[i] = std::move(rec);
      while (next_out < done.size() && done[next_out]) {
        csv << csv_row(*done[next_out], opt.wall_time) << '\n';
        ++next_out;
      }
      csv << std::flush;
    }
  };
  const std::size_t jobs = std::min(std::max<std::size_t>(1, g.jobs), std::max<std::size_t>(1, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < next_out; ++i) {
    out.crashed += done[i]->outcome == Outcome::Crashed;
    out.rows.push_back(*done[i]);
  }
  out.interrupted = next_out < cells.size();
  if (!out.interrupted)
    for (const auto& s : summarise(out.rows)) csv << csv_summary_row(s, opt.wall_time) << '\n';
  csv << std::flush;
  return out;
}

}  // namespace gbral
