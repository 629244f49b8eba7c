#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "gbral/automaton.hpp"
#include "gbral/sut.hpp"
#include "gbral/tainted_tree_oracle.hpp"

namespace gbral {

struct EquivalenceVerdict {
  std::optional<DataWord> counterexample;
  bool sut_accepts = false;       // SUT verdict on the counterexample
  std::size_t words_tested = 0;
  bool budget_exhausted = false;  // "yes" only because the budget ran out

  bool yes() const { return !counterexample.has_value(); }
};

namespace detail {

// Re-queries the SUT so that a surfaced counterexample is never a fluke.
inline bool confirm_counterexample(const RegisterAutomaton& h, SutSession& s, const DataWord& w,
                                   EquivalenceVerdict& out) {
  bool sut = s.membership_query(w).accepted;
  if (sut == accepts(h, w)) return false;
  out.counterexample = w;
  out.sut_accepts = sut;
  return true;
}

}  // namespace detail

struct RandomWalkConfig {
  std::size_t max_len = 20;
  double reset_probability = 0.1;  // chance to stop after each symbol
  double reuse_probability = 0.5;  // chance to reuse a value already in the word
  Value pool_size = 100;           // fresh values come from {0, ..., pool_size - 1}
  bool pool_includes_constants = false;
  std::size_t max_words = SIZE_MAX;
};

// Random words of geometric length; values either repeat one already in the
// word or are drawn uniformly from the pool. Answers yes once the budget (or
// max_words) is used up.
template <typename Rng>
EquivalenceVerdict random_walk_eq(const RegisterAutomaton& h, SutSession& s, const RandomWalkConfig& cfg, Rng& rng) {
  EquivalenceVerdict out;
  const Alphabet& sigma = s.alphabet();
  std::vector<Value> pool;
  for (Value d = 0; d < cfg.pool_size; ++d)
    if (cfg.pool_includes_constants || !s.structure().is_constant_value(d)) pool.push_back(d);
  if (sigma.empty() || pool.empty()) return out;

  std::uniform_int_distribution<std::size_t> pick_action(0, sigma.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_pool(0, pool.size() - 1);
  std::bernoulli_distribution stop(cfg.reset_probability);
  std::bernoulli_distribution reuse(cfg.reuse_probability);
  try {
    while (out.words_tested < cfg.max_words) {
      DataWord w;
      std::vector<Value> seen;
      do {
        const Action& a = sigma[pick_action(rng)];
        Value d = 0;
        if (a.arity > 0) {
          if (!seen.empty() && reuse(rng))
            d = seen[std::uniform_int_distribution<std::size_t>(0, seen.size() - 1)(rng)];
          else
            d = pool[pick_pool(rng)];
          seen.push_back(d);
        }
        w.push_back({a, d});
      } while (w.size() < cfg.max_len && !stop(rng));
      ++out.words_tested;
      if (s.membership_query(w).accepted != accepts(h, w) && detail::confirm_counterexample(h, s, w, out)) return out;
    }
  } catch (const BudgetExhausted&) {
    out.budget_exhausted = true;
  }
  return out;
}

struct TaintedEqConfig {
  std::size_t min_suffix_len = 1;
  std::size_t max_suffix_len = 6;
  std::size_t suffixes_per_length = 64;
};

// Distinct action sequences of length len, uniformly without replacement.
template <typename Rng>
std::vector<SymbolicSuffix> sample_suffixes(const Alphabet& sigma, std::size_t len, std::size_t count, Rng& rng) {
  std::vector<SymbolicSuffix> out;
  if (sigma.empty()) return out;
  double total = std::pow(static_cast<double>(sigma.size()), static_cast<double>(len));
  std::uniform_int_distribution<std::size_t> pick(0, sigma.size() - 1);
  if (total <= 4096) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(total));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < idx.size() && out.size() < count; ++i) {
      SymbolicSuffix w;
      for (std::size_t j = 0, code = idx[i]; j < len; ++j, code /= sigma.size()) w.push_back(sigma[code % sigma.size()]);
      out.push_back(std::move(w));
    }
    return out;
  }
  std::set<SymbolicSuffix> seen;
  while (out.size() < count) {
    SymbolicSuffix w;
    for (std::size_t j = 0; j < len; ++j) w.push_back(sigma[pick(rng)]);
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

// Tainted equivalence oracle: for sampled symbolic suffixes of increasing
// length (empty prefix), runs the characteristic-predicate exploration and
// compares every explored path word with the hypothesis.
template <typename Rng>
EquivalenceVerdict tainted_eq(const RegisterAutomaton& h, SutSession& s, const TaintedEqConfig& cfg, Rng& rng) {
  EquivalenceVerdict out;
  try {
    for (std::size_t len = cfg.min_suffix_len; len <= cfg.max_suffix_len; ++len) {
      for (const auto& w : sample_suffixes(s.alphabet(), len, cfg.suffixes_per_length, rng)) {
        bool found = false;
        compute_characteristic_predicate({{}, w}, s, SIZE_MAX, [&](const DataWord& z, const TaintedObservation& obs) {
          ++out.words_tested;
          if (obs.accepted != accepts(h, z) && detail::confirm_counterexample(h, s, z, out)) found = true;
          return !found;
        });
        if (found) return out;
      }
    }
  } catch (const BudgetExhausted&) {
    out.budget_exhausted = true;
  }
  return out;
}

}  // namespace gbral
