// Learns the combination lock 1-9-6-2 under the four oracle pairings and
// prints the outcome of each, then the model learned with tainted oracles.

#include <iostream>

#include "gbral/gbral.hpp"

using namespace gbral;

int main(int argc, char** argv) {
  const std::string sut = argc > 1 ? argv[1] : "lock:1,9,6,2";
  std::optional<RegisterAutomaton> tainted_model;
  std::cout << csv_header(false) << "\n";
  for (std::string o : {"tto+teo", "tto+neo", "nto+teo", "nto+neo"}) {
    ExperimentConfig cfg;
    cfg.sut = sut;
    cfg.oracles = parse_oracles(o);
    auto r = run_experiment(cfg);
    std::cout << csv_row(r.metrics, false) << "\n";
    if (o == "tto+teo" && r.metrics.outcome == Outcome::Learned) tainted_model = r.model;
  }
  if (tainted_model) std::cout << "\n" << to_json(*tainted_model).dump(2) << "\n";
}
