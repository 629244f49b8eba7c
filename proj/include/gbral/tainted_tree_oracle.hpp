#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "gbral/sdt.hpp"
#include "gbral/solver.hpp"
#include "gbral/sut.hpp"

namespace gbral {

struct TreeQuery {
  DataWord prefix;
  SymbolicSuffix suffix;
};

// nu_u over the data-carrying prefix positions only.
inline Valuation prefix_valuation(const DataWord& u) {
  Valuation nu;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i].action.arity > 0) nu.bind(Var::x(static_cast<std::uint32_t>(i + 1)), u[i].value);
  return nu;
}

// Variable standing for prefix position i (1-based) in tree guards: the
// constant with that value, or else the last data position holding the same
// value. This is the register convention both tree oracles share.
inline Var prefix_representative(const DataWord& u, std::size_t i, const Structure& s) {
  Value d = u[i - 1].value;
  if (s.is_constant_value(d)) return Var::c(d);
  for (std::size_t j = u.size(); j >= i; --j)
    if (u[j - 1].action.arity > 0 && u[j - 1].value == d) return Var::x(static_cast<std::uint32_t>(j));
  return Var::x(static_cast<std::uint32_t>(i));
}

struct CharacteristicPredicate {
  DnfPredicate h;
  std::size_t iterations = 0;  // one membership query each
  std::vector<Guard> paths;    // every I, in discovery order
};

namespace detail {

// Rewrites the suffix-step constraints of one tainted observation into a
// conjunction over x-variables and constants.
inline Guard canonical_path(const TaintedObservation& obs, const DataWord& u, std::size_t n, const Structure& s) {
  const std::size_t k = u.size();
  auto map = [&](Var v) -> Var {
    if (!v.is_marker()) return v;
    if (v.index <= k) return prefix_representative(u, v.index, s);
    return Var::x(v.index);
  };
  std::vector<Literal> lits;
  for (std::size_t i = k; i < k + n; ++i) {
    for (const auto& l : obs.constraints.at(i).literals()) {
      Literal m = Literal::make(map(l.lhs), map(l.rhs), l.equal);
      auto suffix_var = [&](Var v) { return v.is_register() && v.index > k; };
      if (!suffix_var(m.lhs) && !suffix_var(m.rhs)) continue;
      if (m.trivially_true()) continue;
      lits.push_back(m);
    }
  }
  return Guard(std::move(lits));
}

}  // namespace detail

// Sees every queried word with its observation; returning false stops the
// exploration early.
using PathObserver = std::function<bool(const DataWord&, const TaintedObservation&)>;

// Explores one path of the SUT per membership query until every
// equality type of the suffix parameters is covered by a recorded path.
inline CharacteristicPredicate compute_characteristic_predicate(const TreeQuery& q, SutSession& s,
                                                                std::size_t max_iterations = SIZE_MAX,
                                                                const PathObserver& observe = {}) {
  const std::size_t k = q.prefix.size();
  const std::size_t n = q.suffix.size();
  const Valuation nu_u = prefix_valuation(q.prefix);
  const auto consts = s.structure().values();
  std::vector<Var> free;
  for (std::size_t j = 0; j < n; ++j)
    if (q.suffix[j].arity > 0) free.push_back(Var::x(static_cast<std::uint32_t>(k + j + 1)));

  CharacteristicPredicate out;
  Frontier g;
  while (auto nu = g.find_model(nu_u, free, consts)) {
    if (out.iterations == max_iterations) throw BudgetExhausted("tree query exceeded its iteration cap");
    std::vector<Value> vals(n, 0);
    for (std::size_t j = 0; j < n; ++j)
      if (q.suffix[j].arity > 0) vals[j] = nu->at(Var::x(static_cast<std::uint32_t>(k + j + 1)));
    DataWord z = q.prefix.concat(instantiate(q.suffix, vals));
    TaintedObservation obs = s.membership_query(z);
    ++out.iterations;
    if (observe && !observe(z, obs)) break;
    Guard path = detail::canonical_path(obs, q.prefix, n, s.structure());
    if (obs.accepted) out.h.add(path);
    out.paths.push_back(path);
    g.exclude(path);
  }
  return out;
}

namespace detail {

inline SdtNode sdt_build(const DnfPredicate& h, const Valuation& nu_u, std::size_t k, const SymbolicSuffix& w,
                         std::size_t depth) {
  if (depth == w.size()) return SdtNode::leaf(!h.is_bottom());
  SdtNode node;
  if (w[depth].arity == 0) {
    node.children.push_back(sdt_build(h, nu_u, k, w, depth + 1));
    return node;
  }
  const Var xn = Var::x(static_cast<std::uint32_t>(k + depth + 1));
  std::set<Var> targets;
  for (const auto& f : h.disjuncts)
    for (const auto& l : f.literals())
      if (l.lhs == xn) targets.insert(l.rhs);

  Guard all_ne;
  for (Var t : targets) all_ne.add(Literal::ne(xn, t));
  DnfPredicate ne_part;
  for (const auto& f : h.disjuncts) {
    Guard fg = f.conjoin(all_ne);
    if (satisfiable(fg, nu_u)) ne_part.add(fg);
  }
  node.children.push_back(sdt_build(ne_part, nu_u, k, w, depth + 1));

  for (Var t : targets) {
    DnfPredicate eq_part;
    for (const auto& f : h.disjuncts) {
      Guard fe = f.conjoin(Guard{Literal::eq(xn, t)});
      if (!satisfiable(fe, nu_u)) continue;
      eq_part.add(fe.rename([&](Var v) { return v == xn ? t : v; }).without_trivial());
    }
    node.eq_targets.push_back(t);
    node.children.push_back(sdt_build(eq_part, nu_u, k, w, depth + 1));
  }
  return node;
}

}  // namespace detail

// The (possibly non-minimal) equality tree of a characteristic
// predicate. Disjuncts unsatisfiable under nu_u are pruned along the way.
inline Sdt sdt_construct(const DnfPredicate& h, const TreeQuery& q) {
  Valuation nu_u = prefix_valuation(q.prefix);
  return {q.prefix.size(), q.suffix, detail::sdt_build(satisfiable_part(h, nu_u), nu_u, q.prefix.size(), q.suffix, 0)};
}

inline Sdt minimise_sdt(const Sdt& t) { return minimise(t); }

struct TreeQueryResult {
  Sdt sdt;
  std::size_t membership_queries = 0;
};

inline TreeQueryResult tree_query(const TreeQuery& q, SutSession& s) {
  auto cp = compute_characteristic_predicate(q, s);
  return {minimise(sdt_construct(cp.h, q)), cp.iterations};
}

}  // namespace gbral
