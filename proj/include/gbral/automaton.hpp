#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbral/data_word.hpp"
#include "gbral/guard.hpp"
#include "gbral/solver.hpp"

namespace gbral {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LocationId = std::size_t;

struct Location {
  std::string name;
  bool accepting = false;
  std::vector<Var> registers;  // X(l), always x_i variables
};

// pi: X(target) -> X(source) + {p}; stored as (target register, source variable).
using Assignment = std::vector<std::pair<Var, Var>>;

struct Transition {
  LocationId source = 0;
  std::string action;
  Guard guard;
  Assignment assignment;
  LocationId target = 0;
};

class RegisterAutomaton {
 public:
  RegisterAutomaton() = default;
  RegisterAutomaton(Alphabet alphabet, Structure structure)
      : alphabet_(std::move(alphabet)), structure_(std::move(structure)) {}

  LocationId add_location(std::string name, bool accepting, std::vector<Var> registers = {}) {
    locations_.push_back({std::move(name), accepting, std::move(registers)});
    outgoing_.emplace_back();
    return locations_.size() - 1;
  }

  void add_transition(LocationId source, std::string action, Guard guard, Assignment assignment,
                      LocationId target) {
    if (source >= locations_.size() || target >= locations_.size())
      throw ModelError("transition references an unknown location");
    find_action(alphabet_, action);
    transitions_.push_back({source, std::move(action), std::move(guard), std::move(assignment), target});
    outgoing_[source].push_back(transitions_.size() - 1);
  }

  void set_initial(LocationId l) { initial_ = l; }
  void set_name(std::string n) { name_ = std::move(n); }

  const std::string& name() const { return name_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const Structure& structure() const { return structure_; }
  const std::vector<Location>& locations() const { return locations_; }
  const Location& location(LocationId l) const { return locations_.at(l); }
  const std::vector<Transition>& transitions() const { return transitions_; }
  LocationId initial() const { return initial_; }

  std::vector<const Transition*> transitions_from(LocationId l, const std::string& action) const {
    std::vector<const Transition*> out;
    for (auto t : outgoing_.at(l))
      if (transitions_[t].action == action) out.push_back(&transitions_[t]);
    return out;
  }

  std::optional<LocationId> find_location(const std::string& n) const {
    for (LocationId l = 0; l < locations_.size(); ++l)
      if (locations_[l].name == n) return l;
    return std::nullopt;
  }

 private:
  std::string name_;
  Alphabet alphabet_;
  Structure structure_;
  std::vector<Location> locations_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::size_t>> outgoing_;
  LocationId initial_ = 0;
};

struct RunStep {
  LocationId location = 0;
  Valuation registers;
};

struct RunResult {
  bool accepted = false;
  std::vector<RunStep> trace;
};

namespace detail {

inline const Transition& fire(const RegisterAutomaton& ra, LocationId l, const Symbol& s,
                              const Valuation& iota) {
  const Transition* fired = nullptr;
  for (const Transition* t : ra.transitions_from(l, s.action.name)) {
    if (!evaluate_guard(iota, t->guard)) continue;
    if (fired)
      throw ModelError("nondeterminism at " + ra.location(l).name + " on " + to_string(s));
    fired = t;
  }
  if (!fired) throw ModelError("no transition at " + ra.location(l).name + " on " + to_string(s));
  return *fired;
}

}  // namespace detail

// Runs w from `start` (default: initial location, empty valuation).
inline RunResult run(const RegisterAutomaton& ra, const DataWord& w,
                     std::optional<RunStep> start = std::nullopt) {
  RunResult r;
  RunStep cur = start.value_or(RunStep{ra.initial(), {}});
  r.trace.push_back(cur);
  for (const auto& s : w) {
    Valuation iota = cur.registers;
    iota.bind(Var::p(), s.value);
    const Transition& t = detail::fire(ra, cur.location, s, iota);
    RunStep next{t.target, {}};
    for (const auto& [reg, src] : t.assignment) next.registers.bind(reg, iota.at(src));
    cur = std::move(next);
    r.trace.push_back(cur);
  }
  r.accepted = ra.location(cur.location).accepting;
  return r;
}

inline bool accepts(const RegisterAutomaton& ra, const DataWord& w) { return run(ra, w).accepted; }

struct TaintedRunResult {
  bool accepted = false;
  std::vector<Guard> constraints;  // G_i over markers v_1..v_n and constants
};

// constraints[i] = g_i[kappa_i] with kappa_i = zeta_{i-1} + {p -> v_i}.
inline TaintedRunResult tainted_run(const RegisterAutomaton& ra, const DataWord& w) {
  TaintedRunResult r;
  LocationId loc = ra.initial();
  Valuation nu;
  std::map<Var, Var> zeta;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Symbol& s = w[i];
    Valuation iota = nu;
    iota.bind(Var::p(), s.value);
    const Transition& t = detail::fire(ra, loc, s, iota);
    std::map<Var, Var> kappa = zeta;
    kappa[Var::p()] = Var::v(static_cast<std::uint32_t>(i + 1));
    r.constraints.push_back(t.guard.rename([&](Var x) {
      if (x.is_constant()) return x;
      auto it = kappa.find(x);
      if (it == kappa.end()) throw ModelError("guard references unset register " + to_string(x));
      return it->second;
    }));
    Valuation next;
    std::map<Var, Var> next_zeta;
    for (const auto& [reg, src] : t.assignment) {
      next.bind(reg, iota.at(src));
      next_zeta[reg] = kappa.at(src);
    }
    nu = std::move(next);
    zeta = std::move(next_zeta);
    loc = t.target;
  }
  r.accepted = ra.location(loc).accepting;
  return r;
}

// Structural well-formedness checks: guards and assignments over the right
// variables, determinism, complete specification and (optionally) simplicity.
// Returns a list of human readable problems, empty when valid.
inline std::vector<std::string> validate(const RegisterAutomaton& ra, bool require_simple = true) {
  std::vector<std::string> problems;
  if (ra.locations().empty()) return {"automaton has no locations"};
  if (require_simple && !ra.location(ra.initial()).registers.empty())
    problems.push_back("initial location has registers (not simple)");
  auto consts = ra.structure().values();
  for (const auto& t : ra.transitions()) {
    const auto& src = ra.location(t.source);
    const auto& dst = ra.location(t.target);
    const Action& a = find_action(ra.alphabet(), t.action);
    auto in_scope = [&](Var x) {
      if (x.is_parameter()) return a.arity > 0;
      if (x.is_constant()) return ra.structure().is_constant_value(x.index);
      return std::find(src.registers.begin(), src.registers.end(), x) != src.registers.end();
    };
    for (const auto& l : t.guard.literals())
      if (!in_scope(l.lhs) || !in_scope(l.rhs))
        problems.push_back(src.name + " -" + t.action + "-> " + dst.name + ": guard out of scope");
    std::set<Var> assigned;
    for (const auto& [reg, from] : t.assignment) {
      assigned.insert(reg);
      if (!in_scope(from) || from.is_constant())
        problems.push_back(src.name + " -" + t.action + "-> " + dst.name + ": bad assignment source");
    }
    if (assigned != std::set<Var>(dst.registers.begin(), dst.registers.end()))
      problems.push_back(src.name + " -" + t.action + "-> " + dst.name + ": assignment does not cover X(target)");
  }
  for (LocationId l = 0; l < ra.locations().size(); ++l) {
    const auto& loc = ra.location(l);
    for (const auto& a : ra.alphabet()) {
      auto ts = ra.transitions_from(l, a.name);
      for (std::size_t i = 0; i < ts.size(); ++i)
        for (std::size_t j = i + 1; j < ts.size(); ++j)
          if (satisfiable(ts[i]->guard.conjoin(ts[j]->guard)))
            problems.push_back(loc.name + "/" + a.name + ": overlapping guards (nondeterministic)");
      Frontier f;
      for (const auto* t : ts) f.exclude(t->guard);
      std::vector<Var> vars = loc.registers;
      if (a.arity > 0) vars.push_back(Var::p());
      if (auto gap = f.find_model({}, vars, consts))
        problems.push_back(loc.name + "/" + a.name + ": not completely specified, e.g. " + to_string(*gap));
    }
  }
  return problems;
}

}  // namespace gbral
