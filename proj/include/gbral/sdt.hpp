#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gbral/data_word.hpp"
#include "gbral/guard.hpp"

namespace gbral {

// Node of an equality tree. The node tests the variable of its depth against
// each target (p = t) and has one extra child for p != all targets.
//   children[0]      the disequality branch
//   children[1 + i]  the branch p = eq_targets[i]
// Targets are kept sorted, so structural equality is syntactic isomorphism.
// A node without children is a leaf. Nodes for parameterless actions have no
// targets and exactly one child.
struct SdtNode {
  bool accepting = false;
  std::vector<Var> eq_targets;
  std::vector<SdtNode> children;

  static SdtNode leaf(bool acc) { return {acc, {}, {}}; }

  bool is_leaf() const { return children.empty(); }
  const SdtNode& diseq() const { return children.at(0); }
  const SdtNode& eq_child(std::size_t i) const { return children.at(i + 1); }

  friend bool operator==(const SdtNode&, const SdtNode&) = default;
};

// Answer to a tree query (u, w). The variable tested at depth j is
// x_{prefix_len + j + 1}.
struct Sdt {
  std::size_t prefix_len = 0;
  SymbolicSuffix suffix;
  SdtNode root;

  Var var_at(std::size_t depth) const { return Var::x(static_cast<std::uint32_t>(prefix_len + depth + 1)); }

  friend bool operator==(const Sdt&, const Sdt&) = default;
};

inline bool isomorphic(const SdtNode& a, const SdtNode& b) { return a == b; }
inline bool isomorphic(const Sdt& a, const Sdt& b) {
  return a.prefix_len == b.prefix_len && a.suffix == b.suffix && a.root == b.root;
}

// Applies a variable renaming to every target. When two targets of a node
// collapse into one, their subtrees must be isomorphic after renaming;
// otherwise the result is undefined.
template <typename Fn>
std::optional<SdtNode> rename(const SdtNode& t, Fn&& sigma) {
  if (t.is_leaf()) return t;
  std::vector<SdtNode> kids;
  kids.reserve(t.children.size());
  for (const auto& c : t.children) {
    auto r = rename(c, sigma);
    if (!r) return std::nullopt;
    kids.push_back(std::move(*r));
  }
  std::map<Var, SdtNode> eq;
  for (std::size_t i = 0; i < t.eq_targets.size(); ++i) {
    Var to = sigma(t.eq_targets[i]);
    auto [it, inserted] = eq.emplace(to, kids[i + 1]);
    if (!inserted && !(it->second == kids[i + 1])) return std::nullopt;
  }
  SdtNode out;
  out.accepting = t.accepting;
  out.children.push_back(std::move(kids[0]));
  for (auto& [v, child] : eq) {
    out.eq_targets.push_back(v);
    out.children.push_back(std::move(child));
  }
  return out;
}

// t<from, to>: replaces `from` by `to` throughout.
inline std::optional<SdtNode> relabel(const SdtNode& t, Var from, Var to) {
  return rename(t, [&](Var v) { return v == from ? to : v; });
}

// Specialisation T<J>: identifies every variable of J with max(J), or with
// the constant when J contains one. Undefined when J holds two constants or
// when identified branches disagree.
inline std::optional<SdtNode> specialise(const SdtNode& t, const std::set<Var>& j_set) {
  if (j_set.size() < 2) return t;
  std::size_t consts = std::count_if(j_set.begin(), j_set.end(), [](Var v) { return v.is_constant(); });
  if (consts > 1) return std::nullopt;
  Var into = consts ? *j_set.begin() : *j_set.rbegin();
  return rename(t, [&](Var v) { return j_set.count(v) ? into : v; });
}

// Minimisation, bottom-up: drops each equality branch p = t whose subtree equals
// the disequality subtree with the node's own variable relabelled to t.
inline SdtNode minimise(const SdtNode& t, std::uint32_t var_index) {
  if (t.is_leaf()) return t;
  SdtNode out;
  out.accepting = t.accepting;
  std::vector<SdtNode> kids;
  for (const auto& c : t.children) kids.push_back(minimise(c, var_index + 1));
  out.children.push_back(kids[0]);
  const Var xn = Var::x(var_index);
  for (std::size_t i = 0; i < t.eq_targets.size(); ++i) {
    auto r = relabel(kids[0], xn, t.eq_targets[i]);
    if (r && *r == kids[i + 1]) continue;
    out.eq_targets.push_back(t.eq_targets[i]);
    out.children.push_back(kids[i + 1]);
  }
  return out;
}

inline Sdt minimise(const Sdt& t) {
  return {t.prefix_len, t.suffix, minimise(t.root, static_cast<std::uint32_t>(t.prefix_len + 1))};
}

// Runs an instantiation of the suffix through the tree. `prefix` binds the
// prefix variables (nu_u); `values` holds one value per suffix action.
inline bool classify(const Sdt& t, const Valuation& prefix, const std::vector<Value>& values) {
  Valuation nu = prefix;
  const SdtNode* n = &t.root;
  for (std::size_t j = 0; !n->is_leaf(); ++j) {
    Value d = values.at(j);
    nu.bind(t.var_at(j), d);
    std::size_t pick = 0;
    for (std::size_t i = 0; i < n->eq_targets.size() && pick == 0; ++i)
      if (nu.at(n->eq_targets[i]) == d) pick = i + 1;
    n = &n->children[pick];
  }
  return n->accepting;
}

// Every variable used as a target anywhere in the tree.
inline void collect_targets(const SdtNode& t, std::set<Var>& out) {
  out.insert(t.eq_targets.begin(), t.eq_targets.end());
  for (const auto& c : t.children) collect_targets(c, out);
}

inline std::size_t node_count(const SdtNode& t) {
  std::size_t n = 1;
  for (const auto& c : t.children) n += node_count(c);
  return n;
}

inline std::size_t depth(const SdtNode& t) {
  std::size_t d = 0;
  for (const auto& c : t.children) d = std::max(d, 1 + depth(c));
  return d;
}

// Indented text rendering: one line per branch, equality branches first.
//   Pop(x3)
//     x3 = x1: Pop(x4)
//       x4 = x2: +
//       x4 != x2: -
//     x3 != x1: -
inline std::string to_string(const Sdt& t) {
  std::string out;
  std::function<std::string(const SdtNode&, std::size_t)> head = [&](const SdtNode& n, std::size_t j) {
    if (n.is_leaf()) return std::string(n.accepting ? "+" : "-");
    const Action& a = t.suffix.at(j);
    return a.arity == 0 ? a.name : a.name + "(" + to_string(t.var_at(j)) + ")";
  };
  std::function<void(const SdtNode&, std::size_t, const std::string&)> rec = [&](const SdtNode& n, std::size_t j,
                                                                                 const std::string& ind) {
    if (n.is_leaf()) return;
    const std::string x = to_string(t.var_at(j));
    auto line = [&](const std::string& guard, const SdtNode& c) {
      out += ind + "  " + guard + ": " + head(c, j + 1) + "\n";
      rec(c, j + 1, ind + "  ");
    };
    for (std::size_t i = 0; i < n.eq_targets.size(); ++i) line(x + " = " + to_string(n.eq_targets[i]), n.eq_child(i));
    std::string g;
    for (const auto& tgt : n.eq_targets) g += (g.empty() ? "" : " && ") + x + " != " + to_string(tgt);
    if (t.suffix.at(j).arity == 0 || g.empty()) g = "true";
    line(g, n.diseq());
  };
  out = head(t.root, 0) + "\n";
  rec(t.root, 0, "");
  return out;
}

}  // namespace gbral
