#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gbral {

using Value = std::uint32_t;

// Variables of the equality theory. Constants are identified by their value
// (constant symbols and their values are both distinct, so this is lossless).
// The declaration order of Kind is the canonical order: constants sort first,
// the formal parameter last.
struct Var {
  enum class Kind : std::uint8_t { Constant, Register, Marker, Parameter };

  Kind kind = Kind::Parameter;
  std::uint32_t index = 0;

  static constexpr Var x(std::uint32_t i) { return {Kind::Register, i}; }
  static constexpr Var v(std::uint32_t i) { return {Kind::Marker, i}; }
  static constexpr Var c(Value value) { return {Kind::Constant, value}; }
  static constexpr Var p() { return {Kind::Parameter, 0}; }

  constexpr bool is_constant() const { return kind == Kind::Constant; }
  constexpr bool is_register() const { return kind == Kind::Register; }
  constexpr bool is_marker() const { return kind == Kind::Marker; }
  constexpr bool is_parameter() const { return kind == Kind::Parameter; }

  friend constexpr auto operator<=>(const Var&, const Var&) = default;
};

inline std::string to_string(const Var& v) {
  switch (v.kind) {
    case Var::Kind::Constant: return "c" + std::to_string(v.index);
    case Var::Kind::Register: return "x" + std::to_string(v.index);
    case Var::Kind::Marker: return "v" + std::to_string(v.index);
    case Var::Kind::Parameter: return "p";
  }
  return "?";
}

inline std::ostream& operator<<(std::ostream& os, const Var& v) { return os << to_string(v); }

// An (in)equality literal. Normalised so that lhs >= rhs in the canonical
// variable order: the higher-indexed (later) variable is on the left.
struct Literal {
  Var lhs;
  Var rhs;
  bool equal = true;

  static Literal make(Var a, Var b, bool equal) {
    if (a < b) std::swap(a, b);
    return {a, b, equal};
  }
  static Literal eq(Var a, Var b) { return make(a, b, true); }
  static Literal ne(Var a, Var b) { return make(a, b, false); }

  bool trivially_true() const { return equal && lhs == rhs; }
  bool trivially_false() const {
    return (!equal && lhs == rhs) ||
           (equal && lhs.is_constant() && rhs.is_constant() && lhs != rhs);
  }
  Literal negated() const { return {lhs, rhs, !equal}; }
  bool mentions(Var x) const { return lhs == x || rhs == x; }

  friend auto operator<=>(const Literal&, const Literal&) = default;
};

inline std::string to_string(const Literal& l) {
  return to_string(l.lhs) + (l.equal ? " = " : " != ") + to_string(l.rhs);
}

// Conjunction of literals in normal form (sorted, deduplicated). The empty
// conjunction is true.
class Guard {
 public:
  Guard() = default;
  Guard(std::initializer_list<Literal> lits) : literals_(lits) { normalise(); }
  explicit Guard(std::vector<Literal> lits) : literals_(std::move(lits)) { normalise(); }

  static Guard top() { return {}; }

  const std::vector<Literal>& literals() const { return literals_; }
  bool is_top() const { return literals_.empty(); }
  std::size_t size() const { return literals_.size(); }

  Guard& add(const Literal& l) {
    auto it = std::lower_bound(literals_.begin(), literals_.end(), l);
    if (it == literals_.end() || *it != l) literals_.insert(it, l);
    return *this;
  }

  Guard conjoin(const Guard& other) const {
    std::vector<Literal> all = literals_;
    all.insert(all.end(), other.literals_.begin(), other.literals_.end());
    return Guard(std::move(all));
  }

  bool mentions(Var x) const {
    return std::any_of(literals_.begin(), literals_.end(),
                       [&](const Literal& l) { return l.mentions(x); });
  }

  // Variable renaming g[sigma]; unmapped variables are kept.
  template <typename Fn>
  Guard rename(Fn&& sigma) const {
    std::vector<Literal> out;
    out.reserve(literals_.size());
    for (const auto& l : literals_) out.push_back(Literal::make(sigma(l.lhs), sigma(l.rhs), l.equal));
    return Guard(std::move(out));
  }

  // Drops literals of the form a = a.
  Guard without_trivial() const {
    std::vector<Literal> out;
    for (const auto& l : literals_)
      if (!l.trivially_true()) out.push_back(l);
    return Guard(std::move(out));
  }

  friend bool operator==(const Guard&, const Guard&) = default;
  friend auto operator<=>(const Guard& a, const Guard& b) { return a.literals_ <=> b.literals_; }

 private:
  void normalise() {
    for (auto& l : literals_) l = Literal::make(l.lhs, l.rhs, l.equal);
    std::sort(literals_.begin(), literals_.end());
    literals_.erase(std::unique(literals_.begin(), literals_.end()), literals_.end());
  }

  std::vector<Literal> literals_;
};

inline std::string to_string(const Guard& g) {
  if (g.is_top()) return "true";
  std::string out;
  for (const auto& l : g.literals()) {
    if (!out.empty()) out += " && ";
    out += to_string(l);
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Guard& g) { return os << to_string(g); }

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const Var& v)
      : std::runtime_error("unbound variable " + to_string(v)), var(v) {}
  Var var;
};

// A finite assignment of values to variables. Constants always evaluate to
// their own value and never need to be bound.
class Valuation {
 public:
  Valuation() = default;
  Valuation(std::initializer_list<std::pair<const Var, Value>> init) : bindings_(init) {}

  void bind(Var x, Value d) { bindings_[x] = d; }
  void unbind(Var x) { bindings_.erase(x); }
  bool binds(Var x) const { return x.is_constant() || bindings_.count(x) != 0; }

  std::optional<Value> get(Var x) const {
    if (x.is_constant()) return x.index;
    auto it = bindings_.find(x);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
  }

  Value at(Var x) const {
    auto d = get(x);
    if (!d) throw UnboundVariable(x);
    return *d;
  }

  const std::map<Var, Value>& bindings() const { return bindings_; }
  std::size_t size() const { return bindings_.size(); }

  friend bool operator==(const Valuation&, const Valuation&) = default;

 private:
  std::map<Var, Value> bindings_;
};

inline bool evaluate(const Valuation& nu, const Literal& l) {
  return (nu.at(l.lhs) == nu.at(l.rhs)) == l.equal;
}

// nu |= g. Throws UnboundVariable if g mentions a variable nu does not bind.
inline bool evaluate_guard(const Valuation& nu, const Guard& g) {
  bool result = true;
  for (const auto& l : g.literals())
    if (!evaluate(nu, l)) result = false;  // keep scanning so unbound variables always surface
  return result;
}

inline std::string to_string(const Valuation& nu) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [x, d] : nu.bindings()) {
    if (!first) os << ", ";
    first = false;
    os << to_string(x) << "->" << d;
  }
  os << "}";
  return os.str();
}

// The fixed structure: named constants with distinct values.
class Structure {
 public:
  Structure() = default;

  void add_constant(const std::string& name, Value value) {
    for (const auto& [n, v] : constants_) {
      if (n == name && v == value) return;
      if (n == name || v == value)
        throw std::invalid_argument("constant symbols and values must be distinct: " + name);
    }
    constants_.emplace_back(name, value);
    std::sort(constants_.begin(), constants_.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
  }

  // Constants as variables, ascending by value.
  std::vector<Var> constant_vars() const {
    std::vector<Var> out;
    for (const auto& c : constants_) out.push_back(Var::c(c.second));
    return out;
  }

  std::vector<Value> values() const {
    std::vector<Value> out;
    for (const auto& c : constants_) out.push_back(c.second);
    return out;
  }

  bool is_constant_value(Value d) const {
    return std::any_of(constants_.begin(), constants_.end(),
                       [&](const auto& c) { return c.second == d; });
  }

  std::optional<Value> value_of(const std::string& name) const {
    for (const auto& c : constants_)
      if (c.first == name) return c.second;
    return std::nullopt;
  }

  std::optional<std::string> name_of(Value d) const {
    for (const auto& c : constants_)
      if (c.second == d) return c.first;
    return std::nullopt;
  }

  const std::vector<std::pair<std::string, Value>>& constants() const { return constants_; }
  bool empty() const { return constants_.empty(); }

  // Union of two structures; throws if they disagree on a symbol.
  Structure merged(const Structure& other) const {
    Structure out = *this;
    for (const auto& [n, v] : other.constants_) {
      if (auto existing = out.value_of(n); existing && *existing == v) continue;
      if (out.is_constant_value(v)) continue;
      out.add_constant(n, v);
    }
    return out;
  }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  std::vector<std::pair<std::string, Value>> constants_;
};

}  // namespace gbral
