#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

#include "gbral/automaton.hpp"

namespace gbral {

class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical next values after a word whose data values are `used`: every
// used value, every constant and one fresh value, ascending. Up to renaming
// away from constants this covers every equality type.
inline std::vector<Value> canonical_candidates(const std::vector<Value>& used, const std::vector<Value>& consts) {
  std::vector<Value> out = used;
  out.insert(out.end(), consts.begin(), consts.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  Value fresh = 0;
  while (std::binary_search(out.begin(), out.end(), fresh)) ++fresh;
  out.insert(std::lower_bound(out.begin(), out.end(), fresh), fresh);
  return out;
}

// Calls fn(word) for every canonical instantiation of `acts` appended to
// `prefix` (only the suffix part varies). Stops early when fn returns false.
inline bool for_each_canonical_instantiation(const DataWord& prefix, const SymbolicSuffix& acts,
                                             const std::vector<Value>& consts,
                                             const std::function<bool(const DataWord&)>& fn) {
  DataWord w = prefix;
  std::vector<Value> used = prefix.data_values();
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == acts.size()) return fn(w);
    if (acts[i].arity == 0) {
      w.push_back({acts[i], 0});
      bool go = rec(i + 1);
      w.pop_back();
      return go;
    }
    for (Value d : canonical_candidates(used, consts)) {
      w.push_back({acts[i], d});
      used.push_back(d);
      bool go = rec(i + 1);
      used.pop_back();
      w.pop_back();
      if (!go) return false;
    }
    return true;
  };
  return rec(0);
}

// All canonical words of exactly `len` symbols over the alphabet.
inline bool for_each_canonical_word(const Alphabet& sigma, const std::vector<Value>& consts, std::size_t len,
                                    const std::function<bool(const DataWord&)>& fn) {
  std::vector<std::size_t> pick(len, 0);
  std::function<bool(std::size_t, SymbolicSuffix&)> acts = [&](std::size_t i, SymbolicSuffix& w) -> bool {
    if (i == len) return for_each_canonical_instantiation({}, w, consts, fn);
    for (const auto& a : sigma) {
      w.push_back(a);
      bool go = acts(i + 1, w);
      w.pop_back();
      if (!go) return false;
    }
    return true;
  };
  SymbolicSuffix w;
  return acts(0, w);
}

struct BoundedEquivalence {
  bool equal = true;
  std::optional<DataWord> counterexample;
  std::size_t words_checked = 0;
};

// Exhaustive comparison of two simple, deterministic, completely specified
// RAs on all canonical words up to max_len. Returns the shortest (then
// lexicographically first, by alphabet order and value) word accepted by
// exactly one of them.
inline BoundedEquivalence bounded_equivalent(const RegisterAutomaton& a, const RegisterAutomaton& b,
                                             std::size_t max_len, std::size_t word_cap = 50'000'000) {
  Alphabet sigma = a.alphabet();
  for (const auto& act : b.alphabet())
    if (std::find(sigma.begin(), sigma.end(), act) == sigma.end()) sigma.push_back(act);
  const auto consts = a.structure().merged(b.structure()).values();

  BoundedEquivalence result;
  struct State {
    LocationId loc;
    Valuation nu;
  };
  auto step = [](const RegisterAutomaton& ra, const State& s, const Symbol& sym) {
    Valuation iota = s.nu;
    iota.bind(Var::p(), sym.value);
    const Transition& t = detail::fire(ra, s.loc, sym, iota);
    State next{t.target, {}};
    for (const auto& [reg, src] : t.assignment) next.nu.bind(reg, iota.at(src));
    return next;
  };

  DataWord w;
  std::vector<Value> used;
  // Depth-limited search; true once a counterexample of exactly `target` length is found.
  std::function<bool(const State&, const State&, std::size_t)> dfs = [&](const State& sa, const State& sb,
                                                                        std::size_t target) -> bool {
    if (w.size() == target) {
      if (++result.words_checked > word_cap)
        throw ResourceLimit("bounded equivalence exceeded " + std::to_string(word_cap) + " words");
      return a.location(sa.loc).accepting != b.location(sb.loc).accepting;
    }
    for (const auto& act : sigma) {
      std::vector<Value> cands = act.arity == 0 ? std::vector<Value>{0} : canonical_candidates(used, consts);
      for (Value d : cands) {
        Symbol sym{act, d};
        State na = step(a, sa, sym);
        State nb = step(b, sb, sym);
        w.push_back(sym);
        if (act.arity > 0) used.push_back(d);
        bool found = dfs(na, nb, target);
        if (act.arity > 0) used.pop_back();
        if (found) return true;
        w.pop_back();
      }
    }
    return false;
  };

  State a0{a.initial(), {}};
  State b0{b.initial(), {}};
  for (std::size_t len = 0; len <= max_len; ++len) {
    if (dfs(a0, b0, len)) {
      result.equal = false;
      result.counterexample = w;
      return result;
    }
  }
  return result;
}

}  // namespace gbral
