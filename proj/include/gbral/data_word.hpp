#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gbral/guard.hpp"

namespace gbral {

// An action of the alphabet. Parameterless actions (arity 0) still carry a
// dummy value 0 in data words; no guard may reference it.
struct Action {
  std::string name;
  unsigned arity = 1;

  friend auto operator<=>(const Action&, const Action&) = default;
};

using Alphabet = std::vector<Action>;
using SymbolicSuffix = std::vector<Action>;

struct Symbol {
  Action action;
  Value value = 0;

  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

class DataWord {
 public:
  DataWord() = default;
  DataWord(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}
  explicit DataWord(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  auto begin() const { return symbols_.begin(); }
  auto end() const { return symbols_.end(); }

  void push_back(Symbol s) { symbols_.push_back(std::move(s)); }
  void pop_back() { symbols_.pop_back(); }

  DataWord concat(const DataWord& other) const {
    DataWord out = *this;
    out.symbols_.insert(out.symbols_.end(), other.symbols_.begin(), other.symbols_.end());
    return out;
  }
  DataWord append(Symbol s) const {
    DataWord out = *this;
    out.symbols_.push_back(std::move(s));
    return out;
  }
  DataWord prefix(std::size_t n) const {
    return DataWord(std::vector<Symbol>(symbols_.begin(), symbols_.begin() + std::min(n, size())));
  }
  DataWord suffix_from(std::size_t n) const {
    return DataWord(std::vector<Symbol>(symbols_.begin() + std::min(n, size()), symbols_.end()));
  }

  SymbolicSuffix actions() const {
    SymbolicSuffix out;
    for (const auto& s : symbols_) out.push_back(s.action);
    return out;
  }
  std::vector<Value> values() const {
    std::vector<Value> out;
    for (const auto& s : symbols_) out.push_back(s.value);
    return out;
  }

  // Values carried by arity-one symbols only.
  std::vector<Value> data_values() const {
    std::vector<Value> out;
    for (const auto& s : symbols_)
      if (s.action.arity > 0) out.push_back(s.value);
    return out;
  }

  // nu_u: x_i -> d_i for every position (1-based).
  Valuation valuation() const {
    Valuation nu;
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      nu.bind(Var::x(static_cast<std::uint32_t>(i + 1)), symbols_[i].value);
    return nu;
  }

  friend auto operator<=>(const DataWord&, const DataWord&) = default;

 private:
  std::vector<Symbol> symbols_;
};

// Builds a word from Acts(w) and Vals(w); parameterless actions get value 0.
inline DataWord instantiate(const SymbolicSuffix& acts, const std::vector<Value>& vals) {
  if (acts.size() != vals.size()) throw std::invalid_argument("actions/values length mismatch");
  DataWord w;
  for (std::size_t i = 0; i < acts.size(); ++i)
    w.push_back({acts[i], acts[i].arity == 0 ? Value{0} : vals[i]});
  return w;
}

inline std::string to_string(const Symbol& s) {
  if (s.action.arity == 0) return s.action.name;
  return s.action.name + "(" + std::to_string(s.value) + ")";
}

inline std::string to_string(const DataWord& w) {
  if (w.empty()) return "eps";
  std::string out;
  for (const auto& s : w) {
    if (!out.empty()) out += " ";
    out += to_string(s);
  }
  return out;
}

inline std::string to_string(const SymbolicSuffix& w) {
  if (w.empty()) return "eps";
  std::string out;
  for (const auto& a : w) {
    if (!out.empty()) out += " ";
    out += a.name;
  }
  return out;
}

inline const Action& find_action(const Alphabet& sigma, std::string_view name) {
  for (const auto& a : sigma)
    if (a.name == name) return a;
  throw std::invalid_argument("unknown action '" + std::string(name) + "'");
}

// Parses "Push(5) Push(7) Pop" (also accepts '.' or ',' separators and
// "eps" for the empty word).
inline DataWord parse_word(std::string_view text, const Alphabet& sigma) {
  DataWord w;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                               text[i] == ','))
      ++i;
  };
  skip();
  if (text.substr(i) == "eps") return w;
  while (i < text.size()) {
    std::size_t start = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    if (start == i) throw std::invalid_argument("malformed word: " + std::string(text));
    const Action& a = find_action(sigma, text.substr(start, i - start));
    Value d = 0;
    if (i < text.size() && text[i] == '(') {
      std::size_t close = text.find(')', i);
      if (close == std::string_view::npos) throw std::invalid_argument("missing ')' in word");
      d = static_cast<Value>(std::stoul(std::string(text.substr(i + 1, close - i - 1))));
      i = close + 1;
    } else if (a.arity > 0) {
      throw std::invalid_argument("action " + a.name + " needs a data value");
    }
    w.push_back({a, a.arity == 0 ? Value{0} : d});
    skip();
  }
  return w;
}

inline SymbolicSuffix parse_suffix(std::string_view text, const Alphabet& sigma) {
  SymbolicSuffix out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '.' ||
                               text[i] == ','))
      ++i;
    std::size_t start = i;
    while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
    if (start == i) break;
    auto name = text.substr(start, i - start);
    if (name == "eps") continue;
    out.push_back(find_action(sigma, name));
  }
  return out;
}

}  // namespace gbral
