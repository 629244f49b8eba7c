// gbral: learn one SUT, run a benchmark grid, or check a model file.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "gbral/gbral.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

extern "C" void on_sigint(int) { g_interrupt = true; }

struct BudgetFlags {
  std::uint64_t learning_inputs, learning_resets, testing_inputs, testing_resets, timeout_ms;
  std::size_t max_word_len;

  explicit BudgetFlags(const gbral::Budgets& b)
      : learning_inputs(b.learning.inputs),
        learning_resets(b.learning.resets),
        testing_inputs(b.testing.inputs),
        testing_resets(b.testing.resets),
        timeout_ms(static_cast<std::uint64_t>(b.timeout.count())),
        max_word_len(b.max_word_len) {}

  void attach(CLI::App* app) {
    app->add_option("--budget-learning-inputs", learning_inputs, "Learning-phase input budget")->capture_default_str();
    app->add_option("--budget-learning-resets", learning_resets, "Learning-phase reset budget")->capture_default_str();
    app->add_option("--budget-testing-inputs", testing_inputs, "Input budget per equivalence query")->capture_default_str();
    app->add_option("--budget-testing-resets", testing_resets, "Reset budget per equivalence query")->capture_default_str();
    app->add_option("--max-word-len", max_word_len, "Longest random test word")->capture_default_str();
    app->add_option("--timeout-ms", timeout_ms, "Limit per tree or equivalence query")->capture_default_str();
  }

  gbral::Budgets get() const {
    gbral::Budgets b;
    b.learning = {learning_inputs, learning_resets};
    b.testing = {testing_inputs, testing_resets};
    b.max_word_len = max_word_len;
    b.timeout = std::chrono::milliseconds(timeout_ms);
    return b;
  }
};

std::string file_safe(std::string id) {
  for (auto& ch : id)
    if (ch == ':' || ch == ',') ch = '_';
  return id;
}

int cmd_learn(const std::string& sut, const std::string& oracles, std::uint64_t seed, const BudgetFlags& budgets,
              const std::string& dump_dir, const std::string& out_path) {
  gbral::ExperimentConfig cfg;
  cfg.sut = sut;
  cfg.oracles = gbral::parse_oracles(oracles);
  cfg.seed = seed;
  cfg.budgets = budgets.get();
  gbral::parse_sut_id(sut);
  if (!dump_dir.empty()) std::filesystem::create_directories(dump_dir);

  auto r = gbral::run_experiment(cfg, [&](const gbral::RegisterAutomaton& h, std::size_t round) {
    if (dump_dir.empty()) return;
    auto path = std::filesystem::path(dump_dir) / (file_safe(sut) + "_round" + std::to_string(round) + ".json");
    gbral::save_automaton(h, path.string());
  });
  std::cout << gbral::csv_header() << '\n' << gbral::csv_row(r.metrics) << '\n';
  if (!r.metrics.error.empty()) std::cerr << "stopped: " << r.metrics.error << '\n';
  if (r.model && !out_path.empty()) gbral::save_automaton(*r.model, out_path);
  return r.metrics.outcome == gbral::Outcome::Learned ? 0 : 2;
}

int cmd_bench(const std::string& grid_path, const std::string& out_path, std::optional<std::size_t> jobs,
              bool no_wall_time) {
  gbral::GridConfig g = gbral::load_grid(grid_path);
  if (jobs) g.jobs = *jobs;
  std::ofstream csv(out_path);
  if (!csv) throw gbral::ConfigError("cannot write " + out_path);
  std::signal(SIGINT, on_sigint);

  gbral::GridOptions opt;
  opt.wall_time = !no_wall_time;
  opt.interrupt = &g_interrupt;
  opt.on_record = [](const gbral::MetricsRecord& m) {
    std::cerr << m.sut << ' ' << m.oracles << " seed " << m.seed << ": " << gbral::to_string(m.outcome) << ", "
              << m.symbols << " symbols";
    if (!m.error.empty()) std::cerr << " (" << m.error << ')';
    std::cerr << '\n';
  };
  auto r = gbral::run_grid(g, csv, opt);

  auto dat = std::filesystem::path(out_path).replace_extension(".dat");
  std::ofstream dat_out(dat);
  gbral::write_gnuplot_data(dat_out, gbral::summarise(r.rows));
  std::cerr << r.rows.size() << " runs written to " << out_path << ", medians in " << dat.string() << '\n';
  if (r.interrupted) {
    std::cerr << "interrupted; partial results kept\n";
    return 130;
  }
  return r.crashed ? 1 : 0;
}

int cmd_validate(const std::string& model_path, const std::string& sut, std::size_t depth) {
  auto model = gbral::load_automaton(model_path);
  auto problems = gbral::validate(model);
  for (const auto& p : problems) std::cout << "invalid: " << p << '\n';
  if (!problems.empty()) return 1;
  auto ref = gbral::reference_automaton(gbral::parse_sut_id(sut));
  auto r = gbral::bounded_equivalent(model, ref, depth);
  if (r.equal) {
    std::cout << "equivalent up to length " << depth << " (" << r.words_checked << " words)\n";
    return 0;
  }
  std::cout << "differs on " << gbral::to_string(*r.counterexample) << " (model "
            << (gbral::accepts(model, *r.counterexample) ? "accepts" : "rejects") << ")\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Register-automaton learning with tainted and black-box oracles"};
  app.require_subcommand(1);

  std::string sut = "fifo:2", oracles = "tto+teo", dump_dir, out_model;
  std::uint64_t seed = 1;
  BudgetFlags budgets{gbral::Budgets{}};
  auto* learn = app.add_subcommand("learn", "Learn one SUT and print its metrics row");
  learn->add_option("--sut", sut, "fifo:N, set:N, lock:d1,...,dk or rep:k:v")->capture_default_str();
  learn->add_option("--oracles", oracles, "tto+teo, tto+neo, nto+neo or nto+teo")->capture_default_str();
  learn->add_option("--seed", seed, "Random seed")->capture_default_str();
  learn->add_option("--dump-hypotheses", dump_dir, "Write every hypothesis as JSON into this directory");
  learn->add_option("--out", out_model, "Write the final hypothesis as JSON");
  budgets.attach(learn);

  std::string grid, out_csv = "results.csv";
  std::optional<std::size_t> jobs;
  bool no_wall_time = false;
  auto* bench = app.add_subcommand("bench", "Run a benchmark grid and write CSV plus a gnuplot .dat file");
  bench->add_option("--grid", grid, "Grid file")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", out_csv, "CSV output")->capture_default_str();
  bench->add_option("--jobs", jobs, "Worker threads (overrides [run] jobs)");
  bench->add_flag("--no-wall-time", no_wall_time, "Omit the wall_ms column (byte-reproducible output)");

  std::string model_path, vsut;
  std::size_t depth = 6;
  auto* validate = app.add_subcommand("validate", "Check a model file against a catalog reference");
  validate->add_option("--model", model_path, "Model JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--sut", vsut, "SUT id of the reference")->required();
  validate->add_option("--depth", depth, "Word length bound")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*learn) return cmd_learn(sut, oracles, seed, budgets, dump_dir, out_model);
    if (*bench) return cmd_bench(grid, out_csv, jobs, no_wall_time);
    if (*validate) return cmd_validate(model_path, vsut, depth);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
