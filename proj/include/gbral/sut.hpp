#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gbral/automaton.hpp"
#include "gbral/data_word.hpp"

namespace gbral {

// Query-scoped record of the comparisons executed by the SUT.
class ComparisonLog {
 public:
  void record(const Literal& l) { entries_.push_back(l); }
  void clear() { entries_.clear(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Literal>& entries() const { return entries_; }

  Guard slice(std::size_t from, std::size_t to) const {
    return Guard(std::vector<Literal>(entries_.begin() + static_cast<std::ptrdiff_t>(from),
                                      entries_.begin() + static_cast<std::ptrdiff_t>(to)));
  }

 private:
  std::vector<Literal> entries_;
};

// A data value tagged with marker v_i. Equality operators return the base
// comparison and record exactly one literal, with the polarity that actually
// held, in the value's log. Because the operators return plain bool, && and
// || keep short-circuiting and unevaluated comparisons are never logged.
class TaintedValue {
 public:
  TaintedValue() = default;
  TaintedValue(Value base, std::uint32_t marker, ComparisonLog* log) : base_(base), marker_(marker), log_(log) {}

  Value base() const { return base_; }
  std::uint32_t marker() const { return marker_; }
  Var var() const { return Var::v(marker_); }

  friend bool operator==(const TaintedValue& a, const TaintedValue& b) { return a.compare(b); }
  friend bool operator!=(const TaintedValue& a, const TaintedValue& b) { return !a.compare(b); }
  friend bool operator==(const TaintedValue& a, Value literal) { return a.compare(literal); }
  friend bool operator!=(const TaintedValue& a, Value literal) { return !a.compare(literal); }

 private:
  bool compare(const TaintedValue& other) const {
    bool eq = base_ == other.base_;
    if (ComparisonLog* log = log_ ? log_ : other.log_) log->record(Literal::make(var(), other.var(), eq));
    return eq;
  }
  bool compare(Value literal) const {
    bool eq = base_ == literal;
    if (log_) log_->record(Literal::make(var(), Var::c(literal), eq));
    return eq;
  }

  Value base_ = 0;
  std::uint32_t marker_ = 0;
  ComparisonLog* log_ = nullptr;
};

inline bool tainted_compare(const TaintedValue& a, const TaintedValue& b) { return a == b; }
inline bool tainted_compare(const TaintedValue& a, Value literal) { return a == literal; }

// A simulated program under test. Programs see every input as a TaintedValue
// and decide acceptance of the whole word.
class SutProgram {
 public:
  virtual ~SutProgram() = default;
  virtual void reset() = 0;
  virtual void step(const std::string& action, const TaintedValue& d) = 0;
  virtual bool accepting() const = 0;
};

struct TaintedObservation {
  bool accepted = false;
  std::vector<Guard> constraints;  // one conjunction per symbol, over markers and constants
  std::string diagnostic;          // set when the program crashed
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QueryTimeout : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs and resets sent to the SUT. A reset counts as one symbol.
struct Metrics {
  std::uint64_t inputs = 0;
  std::uint64_t resets = 0;
  std::uint64_t symbols() const { return inputs + resets; }

  Metrics& operator+=(const Metrics& o) {
    inputs += o.inputs;
    resets += o.resets;
    return *this;
  }
  friend Metrics operator-(Metrics a, const Metrics& b) {
    a.inputs -= b.inputs;
    a.resets -= b.resets;
    return a;
  }
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct Budget {
  std::uint64_t inputs = UINT64_MAX;
  std::uint64_t resets = UINT64_MAX;
};

enum class Phase { Learning, Testing };

class SutSession {
 public:
  SutSession(std::string id, Alphabet alphabet, Structure structure, std::unique_ptr<SutProgram> program)
      : id_(std::move(id)),
        alphabet_(std::move(alphabet)),
        structure_(std::move(structure)),
        program_(std::move(program)) {}

  SutSession(SutSession&&) = default;
  SutSession& operator=(SutSession&&) = default;

  const std::string& id() const { return id_; }
  const Alphabet& alphabet() const { return alphabet_; }
  const Structure& structure() const { return structure_; }

  // Resets the SUT (metered), then feeds w with marker v_i on the i-th value.
  TaintedObservation membership_query(const DataWord& w) {
    Metrics& m = phase_metrics(phase_);
    const Budget& b = budget(phase_);
    const Metrics used = m - window_start(phase_);
    if (used.resets + 1 > b.resets || used.inputs + w.size() > b.inputs)
      throw BudgetExhausted(std::string(phase_ == Phase::Learning ? "learning" : "testing") +
                            " budget exhausted");
    if (deadline_ && std::chrono::steady_clock::now() > *deadline_) throw QueryTimeout("query timed out");
    ++m.resets;
    m.inputs += w.size();
    if (record_transcript_) transcript_.push_back({phase_, w});

    log_.clear();
    program_->reset();
    TaintedObservation obs;
    std::size_t mark = 0;
    try {
      for (std::size_t i = 0; i < w.size(); ++i) {
        program_->step(w[i].action.name, TaintedValue(w[i].value, static_cast<std::uint32_t>(i + 1), &log_));
        obs.constraints.push_back(log_.slice(mark, log_.size()));
        mark = log_.size();
      }
      obs.accepted = program_->accepting();
    } catch (const std::exception& e) {
      obs.accepted = false;
      obs.diagnostic = e.what();
      obs.constraints.resize(w.size());
    }
    return obs;
  }

  bool accepts(const DataWord& w) { return membership_query(w).accepted; }

  void set_phase(Phase p) { phase_ = p; }

  // Budgets count from the start of the current window. By default the
  // window is the whole session; restarting it gives a per-query allowance.
  void restart_budget_window(Phase p) { window_start(p) = metrics(p); }

  // Wall-clock limit for the current tree or equivalence query.
  void start_query_clock(std::chrono::milliseconds limit) {
    deadline_ = std::chrono::steady_clock::now() + limit;
  }
  void stop_query_clock() { deadline_.reset(); }
  Phase phase() const { return phase_; }
  void set_budget(Phase p, Budget b) { (p == Phase::Learning ? learn_budget_ : test_budget_) = b; }
  const Budget& budget(Phase p) const { return p == Phase::Learning ? learn_budget_ : test_budget_; }

  const Metrics& metrics(Phase p) const { return p == Phase::Learning ? learn_metrics_ : test_metrics_; }
  Metrics metrics() const {
    Metrics m = learn_metrics_;
    m += test_metrics_;
    return m;
  }

  struct TranscriptEntry {
    Phase phase;
    DataWord word;
  };
  void record_transcript(bool on) { record_transcript_ = on; }
  const std::vector<TranscriptEntry>& transcript() const { return transcript_; }

 private:
  Metrics& phase_metrics(Phase p) { return p == Phase::Learning ? learn_metrics_ : test_metrics_; }
  Metrics& window_start(Phase p) { return p == Phase::Learning ? learn_window_ : test_window_; }

  std::string id_;
  Alphabet alphabet_;
  Structure structure_;
  std::unique_ptr<SutProgram> program_;
  ComparisonLog log_;
  Phase phase_ = Phase::Learning;
  Budget learn_budget_;
  Budget test_budget_;
  Metrics learn_metrics_;
  Metrics test_metrics_;
  Metrics learn_window_;
  Metrics test_window_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  bool record_transcript_ = false;
  std::vector<TranscriptEntry> transcript_;
};

inline TaintedObservation membership_query(SutSession& s, const DataWord& w) { return s.membership_query(w); }

// ---------------------------------------------------------------------------
// Benchmark programs

namespace programs {

// Bounded FIFO queue. Push on a full queue is ignored; popping the wrong
// value or popping an empty queue breaks the session for good.
class Fifo : public SutProgram {
 public:
  explicit Fifo(std::size_t capacity) : capacity_(capacity) {}
  void reset() override {
    items_.clear();
    broken_ = false;
  }
  void step(const std::string& action, const TaintedValue& d) override {
    if (broken_) return;
    if (action == "Push") {
      if (items_.size() < capacity_) items_.push_back(d);
    } else if (action == "Pop") {
      if (items_.empty() || !(d == items_.front())) {
        broken_ = true;
        return;
      }
      items_.pop_front();
    } else {
      throw std::invalid_argument("fifo: unknown action " + action);
    }
  }
  bool accepting() const override { return !broken_; }

 private:
  std::size_t capacity_;
  std::deque<TaintedValue> items_;
  bool broken_ = false;
};

// Bounded set. Insert always succeeds (ignored when full or present);
// removing an absent element breaks the session.
class Set : public SutProgram {
 public:
  explicit Set(std::size_t capacity) : capacity_(capacity) {}
  void reset() override {
    items_.clear();
    broken_ = false;
  }
  void step(const std::string& action, const TaintedValue& d) override {
    if (broken_) return;
    if (action == "Insert") {
      if (items_.size() < capacity_ && find(d) == items_.size()) items_.push_back(d);
    } else if (action == "Remove") {
      std::size_t at = find(d);
      if (at == items_.size()) {
        broken_ = true;
        return;
      }
      items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(at));
    } else {
      throw std::invalid_argument("set: unknown action " + action);
    }
  }
  bool accepting() const override { return !broken_; }

 private:
  std::size_t find(const TaintedValue& d) const {
    for (std::size_t i = 0; i < items_.size(); ++i)
      if (d == items_[i]) return i;
    return items_.size();
  }

  std::size_t capacity_;
  std::vector<TaintedValue> items_;
  bool broken_ = false;
};

// Combination lock: alpha(code[0]) ... alpha(code[k-1]) opens it; a wrong
// digit sends it back to the start. beta is only allowed while open.
class Lock : public SutProgram {
 public:
  explicit Lock(std::vector<Value> code) : code_(std::move(code)) {}
  void reset() override {
    state_ = 0;
    broken_ = false;
  }
  void step(const std::string& action, const TaintedValue& d) override {
    if (broken_) return;
    if (action == "alpha") {
      if (state_ == code_.size()) return;
      state_ = (d == code_[state_]) ? state_ + 1 : 0;
    } else if (action == "beta") {
      if (state_ != code_.size()) broken_ = true;
    } else {
      throw std::invalid_argument("lock: unknown action " + action);
    }
  }
  bool accepting() const override { return !broken_; }

 private:
  std::vector<Value> code_;
  std::size_t state_ = 0;
  bool broken_ = false;
};

// Accepts exactly the words whose last k values all equal the code value.
class Repetition : public SutProgram {
 public:
  Repetition(std::size_t k, Value code) : k_(k), code_(code) {}
  void reset() override { run_ = 0; }
  void step(const std::string& action, const TaintedValue& d) override {
    if (action != "alpha") throw std::invalid_argument("rep: unknown action " + action);
    run_ = (d == code_) ? std::min(run_ + 1, k_) : 0;
  }
  bool accepting() const override { return run_ == k_; }

 private:
  std::size_t k_;
  Value code_;
  std::size_t run_ = 0;
};

}  // namespace programs

// ---------------------------------------------------------------------------
// Catalog: SUT identifiers and their ground-truth automata.

class UnknownSut : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SutSpec {
  enum class Kind { Fifo, Set, Lock, Repetition };
  Kind kind = Kind::Fifo;
  std::size_t size = 1;      // capacity, lock depth or repetition count
  std::vector<Value> code;   // lock digits, or the single repetition value

  std::string id() const {
    switch (kind) {
      case Kind::Fifo: return "fifo:" + std::to_string(size);
      case Kind::Set: return "set:" + std::to_string(size);
      case Kind::Lock: {
        std::string s = "lock:";
        for (std::size_t i = 0; i < code.size(); ++i) s += (i ? "," : "") + std::to_string(code[i]);
        return s;
      }
      case Kind::Repetition: return "rep:" + std::to_string(size) + ":" + std::to_string(code.at(0));
    }
    return {};
  }
};

inline constexpr std::size_t kMaxCapacity = 20;
inline constexpr std::size_t kMaxLockDepth = 6;

inline SutSpec parse_sut_id(const std::string& id) {
  auto colon = id.find(':');
  if (colon == std::string::npos) throw UnknownSut("malformed SUT id '" + id + "'");
  std::string kind = id.substr(0, colon);
  std::string rest = id.substr(colon + 1);
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw UnknownSut("malformed number in SUT id '" + id + "'");
    return std::stoul(s);
  };
  SutSpec spec;
  if (kind == "fifo" || kind == "set") {
    spec.kind = kind == "fifo" ? SutSpec::Kind::Fifo : SutSpec::Kind::Set;
    spec.size = number(rest);
    if (spec.size < 1 || spec.size > kMaxCapacity) throw UnknownSut("capacity out of range in '" + id + "'");
  } else if (kind == "lock") {
    spec.kind = SutSpec::Kind::Lock;
    std::stringstream ss(rest);
    std::string digit;
    while (std::getline(ss, digit, ',')) spec.code.push_back(static_cast<Value>(number(digit)));
    spec.size = spec.code.size();
    if (spec.size < 1 || spec.size > kMaxLockDepth) throw UnknownSut("lock depth out of range in '" + id + "'");
  } else if (kind == "rep") {
    spec.kind = SutSpec::Kind::Repetition;
    auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw UnknownSut("rep needs rep:<k>:<v>, got '" + id + "'");
    spec.size = number(rest.substr(0, c2));
    spec.code = {static_cast<Value>(number(rest.substr(c2 + 1)))};
    if (spec.size < 1 || spec.size > kMaxLockDepth) throw UnknownSut("repetition count out of range in '" + id + "'");
  } else {
    throw UnknownSut("unknown SUT kind '" + kind + "'");
  }
  return spec;
}

inline Alphabet sut_alphabet(const SutSpec& spec) {
  switch (spec.kind) {
    case SutSpec::Kind::Fifo: return {{"Push", 1}, {"Pop", 1}};
    case SutSpec::Kind::Set: return {{"Insert", 1}, {"Remove", 1}};
    case SutSpec::Kind::Lock: return {{"alpha", 1}, {"beta", 0}};
    case SutSpec::Kind::Repetition: return {{"alpha", 1}};
  }
  return {};
}

inline Structure sut_structure(const SutSpec& spec) {
  Structure s;
  for (Value d : spec.code) s.add_constant("c" + std::to_string(d), d);
  return s;
}

namespace detail {

inline std::vector<Var> regs(std::size_t k) {
  std::vector<Var> out;
  for (std::size_t i = 1; i <= k; ++i) out.push_back(Var::x(static_cast<std::uint32_t>(i)));
  return out;
}

inline Assignment identity(std::size_t k) {
  Assignment a;
  for (const auto& x : regs(k)) a.emplace_back(x, x);
  return a;
}

// x_1..x_{k-1} := x_1..x_k with position j (1-based) removed.
inline Assignment drop(std::size_t k, std::size_t j) {
  Assignment a;
  for (std::size_t i = 1; i < k; ++i)
    a.emplace_back(Var::x(static_cast<std::uint32_t>(i)), Var::x(static_cast<std::uint32_t>(i < j ? i : i + 1)));
  return a;
}

// p != x_1 && ... && p != x_{j-1} [&& p = x_j]
inline Guard scan_guard(std::size_t j, bool hit) {
  Guard g;
  for (std::size_t i = 1; i < j; ++i) g.add(Literal::ne(Var::p(), Var::x(static_cast<std::uint32_t>(i))));
  if (hit) g.add(Literal::eq(Var::p(), Var::x(static_cast<std::uint32_t>(j))));
  return g;
}

inline RegisterAutomaton fifo_reference(std::size_t n) {
  RegisterAutomaton ra({{"Push", 1}, {"Pop", 1}}, {});
  ra.set_name("fifo:" + std::to_string(n));
  for (std::size_t k = 0; k <= n; ++k) ra.add_location("l" + std::to_string(k), true, regs(k));
  LocationId sink = ra.add_location("l" + std::to_string(n + 1), false);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k < n) {
      Assignment a = identity(k);
      a.emplace_back(Var::x(static_cast<std::uint32_t>(k + 1)), Var::p());
      ra.add_transition(k, "Push", Guard::top(), a, k + 1);
    } else {
      ra.add_transition(k, "Push", Guard::top(), identity(k), k);
    }
    if (k == 0) {
      ra.add_transition(k, "Pop", Guard::top(), {}, sink);
    } else {
      ra.add_transition(k, "Pop", {Literal::eq(Var::p(), Var::x(1))}, drop(k, 1), k - 1);
      ra.add_transition(k, "Pop", {Literal::ne(Var::p(), Var::x(1))}, {}, sink);
    }
  }
  ra.add_transition(sink, "Push", Guard::top(), {}, sink);
  ra.add_transition(sink, "Pop", Guard::top(), {}, sink);
  return ra;
}

inline RegisterAutomaton set_reference(std::size_t n) {
  RegisterAutomaton ra({{"Insert", 1}, {"Remove", 1}}, {});
  ra.set_name("set:" + std::to_string(n));
  for (std::size_t k = 0; k <= n; ++k) ra.add_location("l" + std::to_string(k), true, regs(k));
  LocationId sink = ra.add_location("l" + std::to_string(n + 1), false);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k < n) {
      for (std::size_t j = 1; j <= k; ++j) ra.add_transition(k, "Insert", scan_guard(j, true), identity(k), k);
      Assignment a = identity(k);
      a.emplace_back(Var::x(static_cast<std::uint32_t>(k + 1)), Var::p());
      ra.add_transition(k, "Insert", scan_guard(k + 1, false), a, k + 1);
    } else {
      ra.add_transition(k, "Insert", Guard::top(), identity(k), k);
    }
    for (std::size_t j = 1; j <= k; ++j) ra.add_transition(k, "Remove", scan_guard(j, true), drop(k, j), k - 1);
    ra.add_transition(k, "Remove", scan_guard(k + 1, false), {}, sink);
  }
  ra.add_transition(sink, "Insert", Guard::top(), {}, sink);
  ra.add_transition(sink, "Remove", Guard::top(), {}, sink);
  return ra;
}

inline RegisterAutomaton lock_reference(const std::vector<Value>& code) {
  SutSpec spec{SutSpec::Kind::Lock, code.size(), code};
  RegisterAutomaton ra(sut_alphabet(spec), sut_structure(spec));
  ra.set_name(spec.id());
  const std::size_t k = code.size();
  for (std::size_t i = 0; i <= k; ++i) ra.add_location("l" + std::to_string(i), true);
  LocationId sink = ra.add_location("sink", false);
  for (std::size_t i = 0; i < k; ++i) {
    ra.add_transition(i, "alpha", {Literal::eq(Var::p(), Var::c(code[i]))}, {}, i + 1);
    ra.add_transition(i, "alpha", {Literal::ne(Var::p(), Var::c(code[i]))}, {}, 0);
    ra.add_transition(i, "beta", Guard::top(), {}, sink);
  }
  ra.add_transition(k, "alpha", Guard::top(), {}, k);
  ra.add_transition(k, "beta", Guard::top(), {}, k);
  ra.add_transition(sink, "alpha", Guard::top(), {}, sink);
  ra.add_transition(sink, "beta", Guard::top(), {}, sink);
  return ra;
}

inline RegisterAutomaton repetition_reference(std::size_t k, Value v) {
  SutSpec spec{SutSpec::Kind::Repetition, k, {v}};
  RegisterAutomaton ra(sut_alphabet(spec), sut_structure(spec));
  ra.set_name(spec.id());
  for (std::size_t i = 0; i <= k; ++i) ra.add_location("l" + std::to_string(i), i == k);
  for (std::size_t i = 0; i <= k; ++i) {
    ra.add_transition(i, "alpha", {Literal::eq(Var::p(), Var::c(v))}, {}, std::min(i + 1, k));
    ra.add_transition(i, "alpha", {Literal::ne(Var::p(), Var::c(v))}, {}, 0);
  }
  return ra;
}

}  // namespace detail

inline RegisterAutomaton reference_automaton(const SutSpec& spec) {
  switch (spec.kind) {
    case SutSpec::Kind::Fifo: return detail::fifo_reference(spec.size);
    case SutSpec::Kind::Set: return detail::set_reference(spec.size);
    case SutSpec::Kind::Lock: return detail::lock_reference(spec.code);
    case SutSpec::Kind::Repetition: return detail::repetition_reference(spec.size, spec.code.at(0));
  }
  throw UnknownSut("unknown SUT kind");
}

inline SutSession make_session(const SutSpec& spec) {
  std::unique_ptr<SutProgram> prog;
  switch (spec.kind) {
    case SutSpec::Kind::Fifo: prog = std::make_unique<programs::Fifo>(spec.size); break;
    case SutSpec::Kind::Set: prog = std::make_unique<programs::Set>(spec.size); break;
    case SutSpec::Kind::Lock: prog = std::make_unique<programs::Lock>(spec.code); break;
    case SutSpec::Kind::Repetition: prog = std::make_unique<programs::Repetition>(spec.size, spec.code.at(0)); break;
  }
  return SutSession(spec.id(), sut_alphabet(spec), sut_structure(spec), std::move(prog));
}

struct CatalogEntry {
  SutSession session;
  RegisterAutomaton reference;
};

inline CatalogEntry catalog(const std::string& id) {
  SutSpec spec = parse_sut_id(id);
  return {make_session(spec), reference_automaton(spec)};
}

}  // namespace gbral
