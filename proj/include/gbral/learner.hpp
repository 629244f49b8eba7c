#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbral/automaton.hpp"
#include "gbral/equivalence_oracles.hpp"
#include "gbral/sdt.hpp"
#include "gbral/sut.hpp"
#include "gbral/tainted_tree_oracle.hpp"

namespace gbral {

class InvalidCounterexample : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TreeOracle = std::function<TreeQueryResult(const TreeQuery&)>;
using EquivalenceOracle = std::function<EquivalenceVerdict(const RegisterAutomaton&)>;

struct LearnerConfig {
  std::size_t max_rounds = 50;
  std::size_t max_locations = 64;
  bool shorten_counterexamples = true;
  // Adds counterexample suffixes shortest first and stops once the rebuilt
  // hypothesis classifies the counterexample correctly.
  bool lazy_suffixes = true;
};

// Observation structure of a simplified SL*. Short prefixes U are the
// hypothesis locations, V the symbolic suffixes; each (u, v) cell holds the
// SDT answering the tree query. One-symbol extensions of U are taken at one
// representative value per initial guard and must match some row of U up to
// a renaming of memorable registers.
class Learner {
 public:
  Learner(SutSession& s, TreeOracle oracle, LearnerConfig cfg = {})
      : s_(s), oracle_(std::move(oracle)), cfg_(cfg) {
    prefixes_.push_back({});
    suffixes_.push_back({});
    for (const auto& a : s_.alphabet()) suffixes_.push_back({a});
  }

  const std::vector<DataWord>& short_prefixes() const { return prefixes_; }
  const std::vector<SymbolicSuffix>& suffixes() const { return suffixes_; }
  std::size_t tree_queries() const { return cache_.size(); }

  bool add_suffix(const SymbolicSuffix& v) {
    if (std::find(suffixes_.begin(), suffixes_.end(), v) != suffixes_.end()) return false;
    suffixes_.push_back(v);
    return true;
  }

  // Closes the structure and builds the hypothesis.
  const RegisterAutomaton& hypothesis() {
    while (refine_once()) {
      if (prefixes_.size() > cfg_.max_locations)
        throw NonConvergence("more than " + std::to_string(cfg_.max_locations) + " locations");
    }
    hypothesis_ = build();
    return *hypothesis_;
  }

  // Adds every suffix of the (optionally shortened) counterexample. Returns
  // the word that was processed.
  DataWord process_counterexample(const DataWord& ce, bool sut_accepts) {
    if (!hypothesis_) hypothesis();
    if (accepts(*hypothesis_, ce) == sut_accepts)
      throw InvalidCounterexample("hypothesis already agrees with the SUT on " + to_string(ce));
    DataWord w = cfg_.shorten_counterexamples ? shorten(ce) : ce;
    SymbolicSuffix acts = w.actions();
    for (std::size_t i = acts.size(); i-- > 0;) {
      if (!add_suffix(SymbolicSuffix(acts.begin() + static_cast<std::ptrdiff_t>(i), acts.end()))) continue;
      if (cfg_.lazy_suffixes && accepts(hypothesis(), w) == sut_accepts) break;
    }
    return w;
  }

  // Prefix variables of u that some SDT of u's row compares against.
  std::vector<Var> memorable(const DataWord& u) {
    std::set<Var> all;
    for (const auto& v : suffixes_) collect_targets(sdt(u, v).root, all);
    std::vector<Var> out;
    for (Var x : all)
      if (x.is_register() && x.index <= u.size()) out.push_back(x);
    return out;
  }

  const Sdt& sdt(const DataWord& u, const SymbolicSuffix& v) {
    auto key = std::make_pair(u, v);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, oracle_({u, v}).sdt).first;
    return it->second;
  }

  struct Extension {
    Guard guard;
    DataWord word;
  };

  // One extension per initial guard of u on a: p = t_i (earlier targets
  // excluded) for every root target over suffixes starting with a, plus
  // the disequality to all of them.
  std::vector<Extension> extensions(const DataWord& u, const Action& a) {
    if (a.arity == 0) return {{Guard::top(), u.append({a, 0})}};
    std::set<Var> targets;
    for (const auto& v : suffixes_)
      if (!v.empty() && v.front() == a) {
        const auto& root = sdt(u, v).root;
        targets.insert(root.eq_targets.begin(), root.eq_targets.end());
      }
    const Valuation nu = prefix_valuation(u);
    std::vector<Extension> out;
    Guard earlier;
    for (Var t : targets) {
      Guard g = earlier;
      g.add(Literal::eq(Var::p(), t));
      out.push_back({g, u.append({a, nu.at(t)})});
      earlier.add(Literal::ne(Var::p(), t));
    }
    out.push_back({earlier, u.append({a, fresh_value(u)})});
    return out;
  }

  // A renaming of memorable registers under which every SDT of `ext`
  // equals the corresponding SDT of `u`; suffix variables shift by the
  // length difference.
  std::optional<std::map<Var, Var>> match(const DataWord& ext, const DataWord& u) {
    auto from = memorable(ext);
    auto to = memorable(u);
    if (from.size() != to.size()) return std::nullopt;
    std::vector<std::size_t> perm(to.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::map<Var, Var> sigma;
      for (std::size_t i = 0; i < from.size(); ++i) sigma[from[i]] = to[perm[i]];
      const std::size_t k1 = ext.size(), k2 = u.size();
      auto fn = [&](Var x) {
        if (!x.is_register()) return x;
        if (x.index > k1) return Var::x(static_cast<std::uint32_t>(x.index - k1 + k2));
        return sigma.at(x);
      };
      bool all = true;
      for (const auto& v : suffixes_) {
        auto r = rename(sdt(ext, v).root, fn);
        if (!r || !(*r == sdt(u, v).root)) {
          all = false;
          break;
        }
      }
      if (all) return sigma;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
  }

 private:
  Value fresh_value(const DataWord& u) const {
    const auto vals = u.data_values();
    std::set<Value> used(vals.begin(), vals.end());
    for (Value c : s_.structure().values()) used.insert(c);
    Value d = 0;
    while (used.count(d)) ++d;
    return d;
  }

  std::optional<std::pair<std::size_t, std::map<Var, Var>>> find_match(const DataWord& ext) {
    for (std::size_t i = 0; i < prefixes_.size(); ++i)
      if (prefixes_[i] == ext) {
        std::map<Var, Var> id;
        for (Var x : memorable(ext)) id[x] = x;
        return std::make_pair(i, id);
      }
    for (std::size_t i = 0; i < prefixes_.size(); ++i)
      if (auto sigma = match(ext, prefixes_[i])) return std::make_pair(i, *sigma);
    return std::nullopt;
  }

  // One step of closing the structure: fixes the first register
  // inconsistency or promotes the first unmatched extension.
  bool refine_once() {
    for (std::size_t i = 0; i < prefixes_.size(); ++i) {
      const DataWord u = prefixes_[i];
      auto mem_u = memorable(u);
      for (const auto& a : s_.alphabet())
        for (const auto& e : extensions(u, a))
          for (const auto& v : suffixes_) {
            std::set<Var> used;
            collect_targets(sdt(e.word, v).root, used);
            for (Var x : used) {
              if (!x.is_register() || x.index > u.size()) continue;
              if (std::find(mem_u.begin(), mem_u.end(), x) != mem_u.end()) continue;
              SymbolicSuffix av{a};
              av.insert(av.end(), v.begin(), v.end());
              if (add_suffix(av)) return true;
              throw std::logic_error("register inconsistency persists for " + to_string(e.word));
            }
          }
    }
    for (std::size_t i = 0; i < prefixes_.size(); ++i) {
      const DataWord u = prefixes_[i];
      for (const auto& a : s_.alphabet())
        for (const auto& e : extensions(u, a))
          if (!find_match(e.word)) {
            prefixes_.push_back(e.word);
            return true;
          }
    }
    return false;
  }

  RegisterAutomaton build() {
    RegisterAutomaton h(s_.alphabet(), s_.structure());
    h.set_name(s_.id());
    for (std::size_t i = 0; i < prefixes_.size(); ++i)
      h.add_location("l" + std::to_string(i), sdt(prefixes_[i], {}).root.accepting, memorable(prefixes_[i]));
    for (std::size_t i = 0; i < prefixes_.size(); ++i) {
      const DataWord& u = prefixes_[i];
      for (const auto& a : s_.alphabet())
        for (const auto& e : extensions(u, a)) {
          auto m = find_match(e.word);
          if (!m) throw std::logic_error("unclosed extension " + to_string(e.word));
          Assignment pi;
          for (const auto& [src, dst] : m->second)
            pi.emplace_back(dst, src.index == u.size() + 1 ? Var::p() : src);
          std::sort(pi.begin(), pi.end());
          h.add_transition(i, a.name, e.guard, pi, m->first);
        }
    }
    return h;
  }

  // Cuts the counterexample to its shortest failing prefix, then drops
  // single symbols from the back while it keeps failing.
  DataWord shorten(DataWord w) {
    auto fails = [&](const DataWord& z) { return s_.membership_query(z).accepted != accepts(*hypothesis_, z); };
    for (std::size_t n = 0; n < w.size(); ++n)
      if (fails(w.prefix(n))) {
        w = w.prefix(n);
        break;
      }
    for (std::size_t i = w.size(); i-- > 0;) {
      std::vector<Symbol> syms = w.symbols();
      syms.erase(syms.begin() + static_cast<std::ptrdiff_t>(i));
      DataWord z(std::move(syms));
      if (fails(z)) w = z;
    }
    return w;
  }

  SutSession& s_;
  TreeOracle oracle_;
  LearnerConfig cfg_;
  std::vector<DataWord> prefixes_;
  std::vector<SymbolicSuffix> suffixes_;
  std::map<std::pair<DataWord, SymbolicSuffix>, Sdt> cache_;
  std::optional<RegisterAutomaton> hypothesis_;
};

struct LearnResult {
  RegisterAutomaton hypothesis;
  std::size_t rounds = 0;              // equivalence queries asked
  bool testing_budget_exhausted = false;  // last "yes" came from an exhausted budget
  std::vector<DataWord> counterexamples;
};

// Alternates hypothesis construction and equivalence queries until the
// oracle answers yes. `on_hypothesis` sees every hypothesis with its round.
inline LearnResult learn(Learner& learner, const EquivalenceOracle& eq, std::size_t max_rounds,
                         const std::function<void(const RegisterAutomaton&, std::size_t)>& on_hypothesis = {}) {
  LearnResult out;
  for (std::size_t round = 1;; ++round) {
    const RegisterAutomaton& h = learner.hypothesis();
    if (on_hypothesis) on_hypothesis(h, round);
    out.rounds = round;
    EquivalenceVerdict v = eq(h);
    if (v.yes()) {
      out.hypothesis = h;
      out.testing_budget_exhausted = v.budget_exhausted;
      return out;
    }
    if (round >= max_rounds) throw NonConvergence("no agreement after " + std::to_string(max_rounds) + " rounds");
    out.counterexamples.push_back(learner.process_counterexample(*v.counterexample, v.sut_accepts));
  }
}

}  // namespace gbral
