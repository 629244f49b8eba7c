#include <gtest/gtest.h>

#include <sstream>

#include "gbral/experiment.hpp"

using namespace gbral;

namespace {

GridConfig grid_from_text(const std::string& text) {
  std::istringstream in(text);
  return grid_from_toml(parse_toml(in));
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

GridOptions without_wall_time() {
  GridOptions o;
  o.wall_time = false;
  return o;
}

ExperimentConfig config(const std::string& sut, const std::string& oracles, std::uint64_t seed = 1) {
  ExperimentConfig c;
  c.sut = sut;
  c.oracles = parse_oracles(oracles);
  c.seed = seed;
  return c;
}

}  // namespace

TEST(OracleConfig, ParsesAndLabels) {
  EXPECT_EQ(parse_oracles("tto+teo").label(), "TTO+TEO");
  EXPECT_EQ(parse_oracles("NTO+neo").label(), "NTO+NEO");
  EXPECT_EQ(parse_oracles("tto+NEO").label(), "TTO+NEO");
  EXPECT_EQ(parse_oracles("Nto+Teo").label(), "NTO+TEO");
  EXPECT_THROW(parse_oracles("tto"), ConfigError);
  EXPECT_THROW(parse_oracles("xto+teo"), ConfigError);
  EXPECT_THROW(parse_oracles("tto+xeo"), ConfigError);
}

TEST(Toml, SectionsArraysAndComments) {
  std::istringstream in(R"(# grid
[sut]
ids = ["fifo:1",   # first
       "lock:1,9,6,2"]
[budgets]
learning_inputs = 1_000
timeout_ms = 250
[random_walk]
reset_probability = 0.25
[x]
flag = true
)");
  auto t = parse_toml(in);
  auto ids = std::get<std::vector<TomlScalar>>(t["sut"]["ids"]);
  ASSERT_EQ(ids.size(), 2u);
  EXPECT_EQ(std::get<std::string>(ids[1]), "lock:1,9,6,2");
  EXPECT_EQ(std::get<std::int64_t>(std::get<TomlScalar>(t["budgets"]["learning_inputs"])), 1000);
  EXPECT_DOUBLE_EQ(std::get<double>(std::get<TomlScalar>(t["random_walk"]["reset_probability"])), 0.25);
  EXPECT_TRUE(std::get<bool>(std::get<TomlScalar>(t["x"]["flag"])));
}

TEST(Toml, Errors) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return parse_toml(in);
  };
  EXPECT_THROW(bad("key"), ConfigError);
  EXPECT_THROW(bad("[open\n"), ConfigError);
  EXPECT_THROW(bad("k = [1, 2\n"), ConfigError);
  EXPECT_THROW(bad("k = 12abc"), ConfigError);
  EXPECT_THROW(bad("k = \"unterminated"), ConfigError);
}

TEST(Grid, ConfigurationErrorsComeFirst) {
  EXPECT_THROW(grid_from_text("[sut]\nids = [\"queue:2\"]"), UnknownSut);
  EXPECT_THROW(grid_from_text("[oracles]\nconfigs = [\"tto+abc\"]"), ConfigError);
  EXPECT_THROW(grid_from_text("[budgets]\nlearning_inputs = -1"), ConfigError);
  EXPECT_THROW(grid_from_text("[budgets]\nlearnin_inputs = 1"), ConfigError);
  EXPECT_THROW(grid_from_text("[bogus]"), ConfigError);
  EXPECT_THROW(grid_from_text("[random_walk]\nreset_probability = 0"), ConfigError);
  EXPECT_THROW(grid_from_text("[tainted_eq]\nmin_suffix_len = 4\nmax_suffix_len = 2"), ConfigError);
}

TEST(Grid, CellsAreTheCrossProduct) {
  auto g = grid_from_text(R"(
[sut]
ids = ["fifo:1", "set:2"]
[oracles]
configs = ["tto+teo", "nto+neo", "tto+neo"]
[seeds]
count = 4
[budgets]
testing_resets = 77
max_word_len = 9
[run]
jobs = 3
)");
  auto cells = g.cells();
  ASSERT_EQ(cells.size(), 24u);
  EXPECT_EQ(cells[0].sut, "fifo:1");
  EXPECT_EQ(cells[0].seed, 1u);
  EXPECT_EQ(cells[3].seed, 4u);
  EXPECT_EQ(cells[4].oracles.label(), "NTO+NEO");
  EXPECT_EQ(cells[23].sut, "set:2");
  EXPECT_EQ(cells[23].budgets.testing.resets, 77u);
  EXPECT_EQ(cells[23].budgets.max_word_len, 9u);
  EXPECT_EQ(cells[23].budgets.learning.inputs, 1'000'000u);
  EXPECT_EQ(g.jobs, 3u);
  EXPECT_EQ(grid_from_text("[seeds]\nvalues = [3, 9]").seeds, (std::vector<std::uint64_t>{3, 9}));
}

TEST(Experiment, LearnsFifo2) {
  auto r = run_experiment(config("fifo:2", "tto+teo"));
  const auto& m = r.metrics;
  EXPECT_EQ(m.outcome, Outcome::Learned);
  EXPECT_EQ(m.sut, "fifo:2");
  EXPECT_EQ(m.oracles, "TTO+TEO");
  EXPECT_EQ(m.locations, 4u);
  EXPECT_EQ(m.symbols, m.inputs + m.resets);
  EXPECT_EQ(m.symbols, m.learning_symbols + m.testing_symbols);
  EXPECT_GE(m.rounds, 2u);
  ASSERT_TRUE(r.model);
  EXPECT_TRUE(bounded_equivalent(*r.model, reference_automaton(parse_sut_id("fifo:2")), 6).equal);
}

TEST(Experiment, LockIsNotLearnedByNormalOracles) {
  auto m = run_experiment(config("lock:1,9,6,2", "nto+neo")).metrics;
  EXPECT_EQ(m.outcome, Outcome::BudgetExhausted);
  EXPECT_GT(m.symbols, 0u);
}

TEST(Experiment, ZeroBudgetsStopImmediately) {
  auto c = config("fifo:2", "tto+teo");
  c.budgets.learning = {0, 0};
  c.budgets.testing = {0, 0};
  auto m = run_experiment(c).metrics;
  EXPECT_EQ(m.outcome, Outcome::BudgetExhausted);
  EXPECT_EQ(m.symbols, 0u);
  EXPECT_EQ(m.rounds, 0u);
}

TEST(Experiment, TimeoutIsReported) {
  auto c = config("set:3", "nto+teo");
  c.budgets.timeout = std::chrono::milliseconds(0);
  EXPECT_EQ(run_experiment(c).metrics.outcome, Outcome::Timeout);
}

TEST(Experiment, UnknownSutFailsBeforeQuerying) { EXPECT_THROW(run_experiment(config("stack:2", "tto+teo")), UnknownSut); }

// Counters agree with a recount over the query transcript.
TEST(Experiment, MeteringMatchesTranscript) {
  for (std::string oracles : {"tto+teo", "nto+neo", "tto+neo"}) {
    auto c = config("set:2", oracles, 3);
    c.record_transcript = true;
    auto r = run_experiment(c);
    std::uint64_t inputs[2] = {0, 0}, resets[2] = {0, 0};
    for (const auto& e : r.transcript) {
      int p = e.phase == Phase::Learning ? 0 : 1;
      inputs[p] += e.word.size();
      ++resets[p];
    }
    EXPECT_EQ(r.metrics.inputs, inputs[0] + inputs[1]) << oracles;
    EXPECT_EQ(r.metrics.resets, resets[0] + resets[1]) << oracles;
    EXPECT_EQ(r.metrics.learning_symbols, inputs[0] + resets[0]) << oracles;
    EXPECT_EQ(r.metrics.testing_symbols, inputs[1] + resets[1]) << oracles;
  }
}

TEST(Experiment, HypothesisSinkSeesEveryRound) {
  std::vector<std::size_t> rounds;
  auto r = run_experiment(config("lock:1,9,6,2", "tto+teo"),
                          [&](const RegisterAutomaton&, std::size_t round) { rounds.push_back(round); });
  EXPECT_EQ(rounds, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(r.metrics.rounds, 2u);
}

TEST(Csv, QuotesLockIds) {
  MetricsRecord m;
  m.sut = "lock:1,9,6,2";
  m.oracles = "TTO+TEO";
  m.outcome = Outcome::Learned;
  EXPECT_EQ(csv_row(m, false), "\"lock:1,9,6,2\",TTO+TEO,0,learned,0,0,0,0,0,0,0");
  EXPECT_EQ(csv_header(false), "sut,oracles,seed,outcome,inputs,resets,symbols,learning_symbols,testing_symbols,rounds,locations");
}

TEST(Csv, Median) {
  EXPECT_EQ(median({}), 0);
  EXPECT_EQ(median({3, 1, 2}), 2);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(Grid, EmptyGridIsHeaderOnly) {
  std::ostringstream csv;
  auto r = run_grid(GridConfig{}, csv);
  EXPECT_EQ(csv.str(), csv_header() + "\n");
  EXPECT_TRUE(r.rows.empty());
  EXPECT_FALSE(r.interrupted);
}

TEST(Grid, InterruptKeepsAValidPrefix) {
  auto g = grid_from_text("[sut]\nids = [\"fifo:1\"]\n[oracles]\nconfigs = [\"tto+teo\"]\n[seeds]\ncount = 3");
  std::atomic<bool> stop{true};
  GridOptions opt;
  opt.interrupt = &stop;
  std::ostringstream csv;
  auto r = run_grid(g, csv, opt);
  EXPECT_TRUE(r.interrupted);
  EXPECT_EQ(csv.str(), csv_header() + "\n");
}

// Fifo sizes 1..3 under two configurations and 5 seeds: 30 rows plus
// medians; the tainted pair is cheaper from capacity 2 on.
TEST(Grid, FifoSweep) {
  auto g = grid_from_text(R"(
[sut]
ids = ["fifo:1", "fifo:2", "fifo:3"]
[oracles]
configs = ["tto+teo", "nto+neo"]
[seeds]
count = 5
)");
  std::ostringstream csv;
  auto r = run_grid(g, csv, without_wall_time());
  ASSERT_EQ(r.rows.size(), 30u);
  EXPECT_EQ(r.crashed, 0u);
  auto ls = lines(csv.str());
  ASSERT_EQ(ls.size(), 1u + 30u + 6u);
  EXPECT_NE(ls[31].find("fifo:1,TTO+TEO,median,"), std::string::npos);

  std::map<std::string, double> med;
  for (const auto& s : summarise(r.rows)) med[s.sut + " " + s.oracles] = s.median_symbols;
  for (std::string sut : {"fifo:2", "fifo:3"}) EXPECT_LT(med[sut + " TTO+TEO"], med[sut + " NTO+NEO"]) << sut;
  for (const auto& row : r.rows) {
    if (row.oracles == "TTO+TEO") {
      EXPECT_EQ(row.outcome, Outcome::Learned) << row.sut << " seed " << row.seed;
    }
  }

  std::ostringstream dat;
  write_gnuplot_data(dat, summarise(r.rows));
  auto dl = lines(dat.str());
  ASSERT_EQ(dl.size(), 5u);
  EXPECT_EQ(dl[1], "# index sut TTO+TEO NTO+NEO");
  EXPECT_EQ(dl[2].rfind("0 \"fifo:1\" ", 0), 0u);
}

TEST(Grid, NormalOraclesMissTheRepetition) {
  auto g = grid_from_text("[sut]\nids = [\"rep:3:7\"]\n[oracles]\nconfigs = [\"nto+neo\"]\n[seeds]\ncount = 3");
  std::ostringstream csv;
  auto r = run_grid(g, csv);
  ASSERT_EQ(r.rows.size(), 3u);
  for (const auto& row : r.rows) EXPECT_EQ(row.outcome, Outcome::BudgetExhausted);
}

// Identical configuration, identical bytes, regardless of worker count.
TEST(Grid, ByteIdenticalUnderSeed) {
  const std::string text = R"(
[sut]
ids = ["fifo:2", "set:2", "lock:1,9,6"]
[oracles]
configs = ["tto+teo", "tto+neo", "nto+neo"]
[seeds]
values = [4, 5]
)";
  auto run = [&](std::size_t jobs) {
    auto g = grid_from_text(text);
    g.jobs = jobs;
    std::ostringstream csv;
    run_grid(g, csv, without_wall_time());
    return csv.str();
  };
  const std::string a = run(1);
  EXPECT_EQ(a, run(1));
  EXPECT_EQ(a, run(3));
  EXPECT_EQ(lines(a).size(), 1u + 18u + 9u);
}
