#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbral/sdt.hpp"
#include "gbral/solver.hpp"
#include "gbral/sut.hpp"
#include "gbral/tainted_tree_oracle.hpp"

namespace gbral {

// pot(u): data positions i (1-based) with no later position holding d_i.
inline std::vector<std::size_t> potential(const DataWord& u) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i <= u.size(); ++i) {
    if (u[i - 1].action.arity == 0) continue;
    bool shadowed = false;
    for (std::size_t j = i + 1; j <= u.size() && !shadowed; ++j)
      shadowed = u[j - 1].action.arity > 0 && u[j - 1].value == u[i - 1].value;
    if (!shadowed) out.push_back(i);
  }
  return out;
}

class UnsatisfiableGuard : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// d^g_u: a value for p satisfying g after u. Disequality-only guards get the
// smallest natural avoiding the prefix values and the constants.
inline Value representative_value(const DataWord& u, const Guard& g, const Structure& s = {}) {
  auto m = find_model({{g}}, prefix_valuation(u), {Var::p()}, s.values());
  if (!m) throw UnsatisfiableGuard("no representative value for " + to_string(g));
  return m->at(Var::p());
}

struct BlackboxOptions {
  bool memoize = false;
};

namespace detail {

class BlackboxTreeOracle {
 public:
  BlackboxTreeOracle(SutSession& s, BlackboxOptions opt) : s_(s), opt_(opt) {}

  // O(u, w[depth..]) with targets over the extended prefix u.
  SdtNode query(const DataWord& u, const SymbolicSuffix& w, std::size_t depth) {
    std::optional<std::pair<DataWord, std::size_t>> key;
    if (opt_.memoize) {
      key.emplace(u, depth);
      if (auto it = memo_.find(*key); it != memo_.end()) return it->second;
    }
    SdtNode t = build(u, w, depth);
    if (key) memo_.emplace(*key, t);
    return t;
  }

  // Candidates for p = t at the next position: constants, then potential
  // positions whose values are not constants.
  std::vector<std::pair<Var, Value>> candidates(const DataWord& u) const {
    std::vector<std::pair<Var, Value>> out;
    for (Value c : s_.structure().values()) out.emplace_back(Var::c(c), c);
    for (std::size_t i : potential(u))
      if (!s_.structure().is_constant_value(u[i - 1].value))
        out.emplace_back(Var::x(static_cast<std::uint32_t>(i)), u[i - 1].value);
    return out;
  }

  Value fresh(const DataWord& u) const {
    std::set<Value> used;
    for (Value d : u.data_values()) used.insert(d);
    for (Value c : s_.structure().values()) used.insert(c);
    Value d = 0;
    while (used.count(d)) ++d;
    return d;
  }

  std::size_t queries = 0;

 private:
  SdtNode build(const DataWord& u, const SymbolicSuffix& w, std::size_t depth) {
    if (depth == w.size()) {
      ++queries;
      return SdtNode::leaf(s_.membership_query(u).accepted);
    }
    const Action& a = w[depth];
    SdtNode node;
    if (a.arity == 0) {
      node.children.push_back(query(u.append({a, 0}), w, depth + 1));
      return node;
    }
    const Var xm = Var::x(static_cast<std::uint32_t>(u.size() + 1));
    SdtNode t0 = query(u.append({a, fresh(u)}), w, depth + 1);
    node.children.push_back(t0);
    for (const auto& [t, d] : candidates(u)) {
      SdtNode tc = query(u.append({a, d}), w, depth + 1);
      // Prefix positions: x_t is shadowed by x_m in tc, so compare t0 with
      // x_t renamed to x_m. Constants: compare t0 with x_m renamed to c.
      auto r = t.is_constant() ? relabel(t0, xm, t) : relabel(t0, t, xm);
      if (r && *r == tc) continue;
      if (!t.is_constant()) tc = *relabel(tc, xm, t);
      node.eq_targets.push_back(t);
      node.children.push_back(std::move(tc));
    }
    // Candidates come constants first, then ascending positions: already sorted.
    return node;
  }

  SutSession& s_;
  BlackboxOptions opt_;
  std::map<std::pair<DataWord, std::size_t>, SdtNode> memo_;
};

}  // namespace detail

// Necessary potential set for the next action after u (the equality
// targets of the root), computed with the full black-box recursion.
inline std::vector<Var> necessary_potential_set(const DataWord& u, const Action& a, const SymbolicSuffix& rest,
                                                SutSession& s, BlackboxOptions opt = {}) {
  detail::BlackboxTreeOracle o(s, opt);
  SymbolicSuffix w{a};
  w.insert(w.end(), rest.begin(), rest.end());
  return o.query(u, w, 0).eq_targets;
}

// Tree oracle for equality: joins child trees over the necessary potential
// set, using membership verdicts only.
inline TreeQueryResult tree_query_blackbox(const TreeQuery& q, SutSession& s, BlackboxOptions opt = {}) {
  detail::BlackboxTreeOracle o(s, opt);
  SdtNode root = o.query(q.prefix, q.suffix, 0);
  return {Sdt{q.prefix.size(), q.suffix, std::move(root)}, o.queries};
}

}  // namespace gbral
