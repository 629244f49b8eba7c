#pragma once

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "gbral/automaton.hpp"

namespace gbral {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Guard grammar:  guard := "true" | literal ("&&" literal)*
//                 literal := term ("==" | "!=") term
//                 term := "p" | "x<i>" | "c:<name>"
inline Var parse_var(std::string_view tok, const Structure& s) {
  if (tok == "p") return Var::p();
  if (tok.size() > 1 && tok[0] == 'x') {
    for (char ch : tok.substr(1))
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw ParseError("bad register '" + std::string(tok) + "'");
    auto i = std::stoul(std::string(tok.substr(1)));
    if (i == 0) throw ParseError("register indices start at 1");
    return Var::x(static_cast<std::uint32_t>(i));
  }
  if (tok.size() > 2 && tok.substr(0, 2) == "c:") {
    auto v = s.value_of(std::string(tok.substr(2)));
    if (!v) throw ParseError("unknown constant '" + std::string(tok.substr(2)) + "'");
    return Var::c(*v);
  }
  throw ParseError("bad term '" + std::string(tok) + "'");
}

inline Guard parse_guard(std::string_view text, const Structure& s) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < text.size()) {
    char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (text.substr(i, 2) == "==" || text.substr(i, 2) == "!=" || text.substr(i, 2) == "&&") {
      toks.emplace_back(text.substr(i, 2));
      i += 2;
    } else {
      std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '=' &&
             text[i] != '!' && text[i] != '&')
        ++i;
      if (start == i) throw ParseError("unexpected character in guard: " + std::string(text));
      toks.emplace_back(text.substr(start, i - start));
    }
  }
  if (toks.empty() || (toks.size() == 1 && toks[0] == "true")) return Guard::top();
  Guard g;
  std::size_t k = 0;
  while (true) {
    if (k + 3 > toks.size()) throw ParseError("truncated guard: " + std::string(text));
    Var a = parse_var(toks[k], s);
    const auto& op = toks[k + 1];
    Var b = parse_var(toks[k + 2], s);
    if (op != "==" && op != "!=") throw ParseError("expected == or != in guard: " + std::string(text));
    g.add(Literal::make(a, b, op == "=="));
    k += 3;
    if (k == toks.size()) break;
    if (toks[k] != "&&") throw ParseError("expected && in guard: " + std::string(text));
    ++k;
  }
  return g;
}

inline std::string format_var(Var x, const Structure& s) {
  if (x.is_constant()) {
    if (auto n = s.name_of(x.index)) return "c:" + *n;
    return "c:" + std::to_string(x.index);
  }
  return to_string(x);
}

inline std::string format_guard(const Guard& g, const Structure& s) {
  if (g.is_top()) return "true";
  std::string out;
  for (const auto& l : g.literals()) {
    if (!out.empty()) out += " && ";
    out += format_var(l.lhs, s) + (l.equal ? " == " : " != ") + format_var(l.rhs, s);
  }
  return out;
}

inline nlohmann::json to_json(const RegisterAutomaton& ra) {
  using nlohmann::json;
  const Structure& s = ra.structure();
  json j;
  j["name"] = ra.name();
  j["constants"] = json::object();
  for (const auto& [n, v] : s.constants()) j["constants"][n] = v;
  j["actions"] = json::array();
  for (const auto& a : ra.alphabet()) j["actions"].push_back({{"name", a.name}, {"arity", a.arity}});
  j["locations"] = json::array();
  for (const auto& l : ra.locations()) {
    json regs = json::array();
    for (const auto& r : l.registers) regs.push_back(to_string(r));
    j["locations"].push_back({{"name", l.name}, {"accepting", l.accepting}, {"registers", regs}});
  }
  j["initial"] = ra.location(ra.initial()).name;
  j["transitions"] = json::array();
  for (const auto& t : ra.transitions()) {
    json assign = json::object();
    for (const auto& [reg, src] : t.assignment) assign[to_string(reg)] = to_string(src);
    j["transitions"].push_back({{"from", ra.location(t.source).name},
                                {"action", t.action},
                                {"guard", format_guard(t.guard, s)},
                                {"assign", assign},
                                {"to", ra.location(t.target).name}});
  }
  return j;
}

inline RegisterAutomaton from_json(const nlohmann::json& j) {
  try {
    Structure s;
    if (j.contains("constants"))
      for (const auto& [n, v] : j.at("constants").items()) s.add_constant(n, v.get<Value>());
    Alphabet sigma;
    for (const auto& a : j.at("actions")) sigma.push_back({a.at("name").get<std::string>(), a.value("arity", 1u)});
    RegisterAutomaton ra(sigma, s);
    ra.set_name(j.value("name", std::string{}));
    for (const auto& l : j.at("locations")) {
      std::vector<Var> regs;
      for (const auto& r : l.value("registers", nlohmann::json::array())) {
        Var x = parse_var(r.get<std::string>(), s);
        if (!x.is_register()) throw ParseError("registers must be x<i>");
        regs.push_back(x);
      }
      ra.add_location(l.at("name").get<std::string>(), l.at("accepting").get<bool>(), regs);
    }
    auto loc = [&](const std::string& n) {
      auto id = ra.find_location(n);
      if (!id) throw ParseError("unknown location '" + n + "'");
      return *id;
    };
    ra.set_initial(loc(j.at("initial").get<std::string>()));
    for (const auto& t : j.at("transitions")) {
      Assignment pi;
      if (t.contains("assign"))
        for (const auto& [reg, src] : t.at("assign").items())
          pi.emplace_back(parse_var(reg, s), parse_var(src.get<std::string>(), s));
      ra.add_transition(loc(t.at("from").get<std::string>()), t.at("action").get<std::string>(),
                        parse_guard(t.value("guard", std::string("true")), s), std::move(pi),
                        loc(t.at("to").get<std::string>()));
    }
    return ra;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed automaton file: ") + e.what());
  }
}

inline RegisterAutomaton load_automaton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return from_json(j);
}

inline void save_automaton(const RegisterAutomaton& ra, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << to_json(ra).dump(2) << "\n";
}

}  // namespace gbral
