// Taints one FIFO word, answers the Push(5) Push(7) / Pop Pop tree query
// with both oracles, and prints the equality tree before and after
// minimisation.

#include <iostream>

#include "gbral/gbral.hpp"

using namespace gbral;

int main() {
  auto [s, ref] = catalog("fifo:2");

  auto w = parse_word("Push(7) Push(7) Pop(7) Push(5) Pop(7) Pop(5)", s.alphabet());
  auto obs = s.membership_query(w);
  std::cout << to_string(w) << " -> " << (obs.accepted ? "accept" : "reject") << "\n";
  for (std::size_t i = 0; i < obs.constraints.size(); ++i)
    std::cout << "  step " << i + 1 << ": " << to_string(obs.constraints[i]) << "\n";

  TreeQuery q{parse_word("Push(5) Push(7)", s.alphabet()), parse_suffix("Pop Pop", s.alphabet())};
  auto cp = compute_characteristic_predicate(q, s);
  std::cout << "\ncharacteristic predicate after " << cp.iterations << " queries: " << to_string(cp.h) << "\n";
  for (const auto& p : cp.paths) std::cout << "  path " << to_string(p) << "\n";

  auto raw = sdt_construct(cp.h, q);
  std::cout << "\nequality tree:\n" << to_string(raw) << "\nminimised:\n" << to_string(minimise(raw));

  auto fresh = catalog("fifo:2").session;
  auto bb = tree_query_blackbox(q, fresh);
  std::cout << "\nblack-box tree (" << bb.membership_queries << " queries, tainted used " << cp.iterations
            << "): " << (isomorphic(bb.sdt, minimise(raw)) ? "isomorphic" : "DIFFERENT") << "\n";
}
