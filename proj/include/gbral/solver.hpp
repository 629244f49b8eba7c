#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "gbral/guard.hpp"

namespace gbral {

// A disjunction of conjunctions. No disjuncts means false.
struct DnfPredicate {
  std::vector<Guard> disjuncts;

  static DnfPredicate bottom() { return {}; }
  static DnfPredicate top() { return {{Guard::top()}}; }

  bool is_bottom() const { return disjuncts.empty(); }
  void add(Guard g) { disjuncts.push_back(std::move(g)); }

  friend bool operator==(const DnfPredicate&, const DnfPredicate&) = default;
};

inline std::string to_string(const DnfPredicate& h) {
  if (h.disjuncts.empty()) return "false";
  std::string out;
  for (const auto& g : h.disjuncts) {
    if (!out.empty()) out += " || ";
    out += "(" + to_string(g) + ")";
  }
  return out;
}

inline bool evaluate(const Valuation& nu, const DnfPredicate& h) {
  return std::any_of(h.disjuncts.begin(), h.disjuncts.end(),
                     [&](const Guard& g) { return evaluate_guard(nu, g); });
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), value_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }

  // False when the merge equates two different concrete values.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    if (value_[a] && value_[b] && *value_[a] != *value_[b]) return false;
    parent_[b] = a;
    if (!value_[a]) value_[a] = value_[b];
    return true;
  }

  void set_value(std::size_t a, Value d) { value_[find(a)] = d; }
  const std::optional<Value>& value(std::size_t a) { return value_[find(a)]; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::optional<Value>> value_;
};

inline void collect_vars(const Guard& g, std::set<Var>& out) {
  for (const auto& l : g.literals()) {
    out.insert(l.lhs);
    out.insert(l.rhs);
  }
}

}  // namespace detail

// Satisfiability of a conjunction over the naturals. Constants carry their
// values, variables bound by `fixed` are pinned; everything else is free.
inline bool satisfiable(const Guard& c, const Valuation& fixed = {}) {
  std::set<Var> vars;
  detail::collect_vars(c, vars);
  std::vector<Var> ids(vars.begin(), vars.end());
  auto id = [&](Var x) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
  };
  detail::UnionFind uf(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i)
    if (auto d = fixed.get(ids[i])) uf.set_value(i, *d);
  for (const auto& l : c.literals())
    if (l.equal && !uf.unite(id(l.lhs), id(l.rhs))) return false;
  for (const auto& l : c.literals()) {
    if (l.equal) continue;
    auto a = uf.find(id(l.lhs));
    auto b = uf.find(id(l.rhs));
    if (a == b) return false;
    const auto& va = uf.value(a);
    const auto& vb = uf.value(b);
    if (va && vb && *va == *vb) return false;
  }
  return true;
}

// Drops disjuncts that are unsatisfiable under `fixed`.
inline DnfPredicate satisfiable_part(const DnfPredicate& h, const Valuation& fixed = {}) {
  DnfPredicate out;
  for (const auto& g : h.disjuncts)
    if (satisfiable(g, fixed)) out.add(g);
  return out;
}

inline bool satisfiable(const DnfPredicate& h, const Valuation& fixed = {}) {
  return std::any_of(h.disjuncts.begin(), h.disjuncts.end(),
                     [&](const Guard& g) { return satisfiable(g, fixed); });
}

// The full equality type of a valuation over the given variables and constants:
// one literal per pair, stating whether the values coincide.
inline Guard equality_type(const Valuation& nu, const std::vector<Var>& vars) {
  std::vector<Literal> lits;
  for (std::size_t i = 0; i < vars.size(); ++i)
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      if (vars[i].is_constant() && vars[j].is_constant()) continue;
      lits.push_back(Literal::make(vars[i], vars[j], nu.at(vars[i]) == nu.at(vars[j])));
    }
  return Guard(std::move(lits));
}

// The exploration frontier G = P && !I1 && ... && !Im, kept as the positive
// predicate P plus the list of blocked conjunctions I_j. Models are found by
// enumerating equality types of the free variables, never by converting G
// to DNF.
class Frontier {
 public:
  Frontier() = default;
  explicit Frontier(DnfPredicate positive) : positive_(std::move(positive)) {}

  void exclude(Guard blocked) { blocked_.push_back(std::move(blocked)); }
  const std::vector<Guard>& blocked() const { return blocked_; }
  const DnfPredicate& positive() const { return positive_; }

  // A valuation extending `fixed` over `free` (plus any other unbound variable
  // the frontier mentions) that satisfies the frontier. Free variables take,
  // in order of preference, a fresh value (smallest natural not used by a
  // fixed binding, a constant or an earlier choice), then existing values:
  // fixed values by variable order, constants ascending, earlier choices.
  std::optional<Valuation> find_model(const Valuation& fixed, std::vector<Var> free,
                                      const std::vector<Value>& constants = {}) const {
    if (positive_.is_bottom()) return std::nullopt;
    std::set<Var> mentioned;
    for (const auto& g : positive_.disjuncts) detail::collect_vars(g, mentioned);
    for (const auto& g : blocked_) detail::collect_vars(g, mentioned);

    std::set<Value> const_values(constants.begin(), constants.end());
    for (const auto& x : mentioned)
      if (x.is_constant()) const_values.insert(x.index);
    for (const auto& x : mentioned)
      if (!x.is_constant() && !fixed.binds(x) && std::find(free.begin(), free.end(), x) == free.end())
        free.push_back(x);

    std::map<Var, int> level;
    for (std::size_t i = 0; i < free.size(); ++i) level[free[i]] = static_cast<int>(i);
    auto level_of = [&](const Guard& g) {
      int lv = -1;
      for (const auto& l : g.literals())
        for (Var x : {l.lhs, l.rhs})
          if (auto it = level.find(x); it != level.end()) lv = std::max(lv, it->second);
      return lv;
    };

    // Blocked conjunctions grouped by the level at which they become decided.
    std::vector<std::vector<const Guard*>> blocked_at(free.size());
    for (const auto& g : blocked_) {
      int lv = level_of(g);
      if (lv < 0) {
        if (evaluate_guard(fixed, g)) return std::nullopt;
      } else {
        blocked_at[static_cast<std::size_t>(lv)].push_back(&g);
      }
    }

    std::vector<Value> base;
    for (const auto& [x, d] : fixed.bindings())
      if (std::find(base.begin(), base.end(), d) == base.end()) base.push_back(d);
    for (Value c : const_values)
      if (std::find(base.begin(), base.end(), c) == base.end()) base.push_back(c);

    Valuation nu = fixed;
    std::vector<Value> chosen;
    std::function<bool(std::size_t)> search = [&](std::size_t idx) -> bool {
      if (idx == free.size()) return evaluate(nu, positive_);
      std::vector<Value> used = base;
      used.insert(used.end(), chosen.begin(), chosen.end());
      Value fresh = 0;
      while (std::find(used.begin(), used.end(), fresh) != used.end()) ++fresh;
      std::vector<Value> candidates{fresh};
      for (Value d : used)
        if (std::find(candidates.begin(), candidates.end(), d) == candidates.end()) candidates.push_back(d);
      for (Value d : candidates) {
        nu.bind(free[idx], d);
        bool blocked = std::any_of(blocked_at[idx].begin(), blocked_at[idx].end(),
                                   [&](const Guard* g) { return evaluate_guard(nu, *g); });
        if (blocked) continue;
        chosen.push_back(d);
        if (search(idx + 1)) return true;
        chosen.pop_back();
      }
      nu.unbind(free[idx]);
      return false;
    };
    if (!search(0)) return std::nullopt;
    return nu;
  }

 private:
  DnfPredicate positive_ = DnfPredicate::top();
  std::vector<Guard> blocked_;
};

// Model of some disjunct of p extending `fixed`; free variables are those p
// mentions that `fixed` does not bind, plus `extra_free`.
inline std::optional<Valuation> find_model(const DnfPredicate& p, const Valuation& fixed,
                                           const std::vector<Var>& extra_free = {},
                                           const std::vector<Value>& constants = {}) {
  return Frontier(p).find_model(fixed, extra_free, constants);
}

// G := G && !I
inline Frontier& negate_into_frontier(Frontier& g, const Guard& i) {
  g.exclude(i);
  return g;
}

}  // namespace gbral
