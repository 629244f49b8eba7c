#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gbral/equivalence_check.hpp"
#include "gbral/equivalence_oracles.hpp"

using namespace gbral;

namespace {

// Accepts every word without beta: what a learner sees of the lock before
// it finds the code.
RegisterAutomaton lock_without_beta(const SutSession& s) {
  RegisterAutomaton h(s.alphabet(), s.structure());
  auto l0 = h.add_location("l0", true);
  auto sink = h.add_location("sink", false);
  h.add_transition(l0, "alpha", Guard::top(), {}, l0);
  h.add_transition(l0, "beta", Guard::top(), {}, sink);
  h.add_transition(sink, "alpha", Guard::top(), {}, sink);
  h.add_transition(sink, "beta", Guard::top(), {}, sink);
  return h;
}

RegisterAutomaton reject_all(const SutSession& s) {
  RegisterAutomaton h(s.alphabet(), s.structure());
  auto l0 = h.add_location("l0", false);
  for (const auto& a : s.alphabet()) h.add_transition(l0, a.name, Guard::top(), {}, l0);
  return h;
}

void use_desk_testing_budget(SutSession& s) {
  s.set_phase(Phase::Testing);
  s.set_budget(Phase::Testing, {100'000, 500});
}

}  // namespace

TEST(RandomWalk, FindsFifoCapacityDifference) {
  auto [s, ref] = catalog("fifo:2");
  use_desk_testing_budget(s);
  auto h = reference_automaton(parse_sut_id("fifo:1"));
  std::mt19937_64 rng(7);
  auto v = random_walk_eq(h, s, RandomWalkConfig{}, rng);
  ASSERT_FALSE(v.yes());
  EXPECT_FALSE(v.budget_exhausted);
  EXPECT_EQ(v.sut_accepts, accepts(ref, *v.counterexample));
  EXPECT_NE(v.sut_accepts, accepts(h, *v.counterexample));
}

TEST(RandomWalk, AnswersYesOnlyOnceTheBudgetIsSpent) {
  auto [s, ref] = catalog("fifo:2");
  use_desk_testing_budget(s);
  std::mt19937_64 rng(1);
  auto v = random_walk_eq(ref, s, RandomWalkConfig{}, rng);
  EXPECT_TRUE(v.yes());
  EXPECT_TRUE(v.budget_exhausted);
  EXPECT_LE(s.metrics(Phase::Testing).resets, 500u);
  EXPECT_GE(s.metrics(Phase::Testing).resets, 490u);
  EXPECT_EQ(s.metrics(Phase::Learning).symbols(), 0u);
}

TEST(RandomWalk, MaxWordsStopsWithoutExhaustion) {
  auto [s, ref] = catalog("set:2");
  RandomWalkConfig cfg;
  cfg.max_words = 10;
  std::mt19937_64 rng(3);
  auto v = random_walk_eq(ref, s, cfg, rng);
  EXPECT_TRUE(v.yes());
  EXPECT_FALSE(v.budget_exhausted);
  EXPECT_EQ(v.words_tested, 10u);
}

TEST(RandomWalk, NeverReachesTheLockCode) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [s, ref] = catalog("lock:1,9,6,2");
    use_desk_testing_budget(s);
    std::mt19937_64 rng(seed);
    auto v = random_walk_eq(lock_without_beta(s), s, RandomWalkConfig{}, rng);
    EXPECT_TRUE(v.yes()) << "seed " << seed << ": " << to_string(*v.counterexample);
    EXPECT_TRUE(v.budget_exhausted);
  }
}

TEST(RandomWalk, NeverRepeatsTheConstant) {
  auto [s, ref] = catalog("rep:3:7");
  use_desk_testing_budget(s);
  std::mt19937_64 rng(11);
  EXPECT_TRUE(random_walk_eq(reject_all(s), s, RandomWalkConfig{}, rng).yes());
}

TEST(RandomWalk, PoolExcludesConstantsByDefault) {
  auto [s, ref] = catalog("lock:1,9,6,2");
  use_desk_testing_budget(s);
  s.record_transcript(true);
  std::mt19937_64 rng(5);
  random_walk_eq(lock_without_beta(s), s, RandomWalkConfig{}, rng);
  ASSERT_FALSE(s.transcript().empty());
  std::size_t long_words = 0;
  for (const auto& e : s.transcript()) {
    EXPECT_LE(e.word.size(), 20u);
    long_words += e.word.size() > 5;
    for (const auto& sym : e.word)
      if (sym.action.arity > 0) {
        EXPECT_FALSE(s.structure().is_constant_value(sym.value)) << to_string(e.word);
        EXPECT_LT(sym.value, 100);
      }
  }
  EXPECT_GT(long_words, 0u);

  RandomWalkConfig with_constants;
  with_constants.pool_includes_constants = true;
  with_constants.pool_size = 3;  // {0, 1, 2}: 1 and 2 are lock digits
  auto [s2, ref2] = catalog("lock:1,9,6,2");
  use_desk_testing_budget(s2);
  s2.record_transcript(true);
  random_walk_eq(lock_without_beta(s2), s2, with_constants, rng);
  bool saw_constant = false;
  for (const auto& e : s2.transcript())
    for (const auto& sym : e.word) saw_constant |= sym.action.arity > 0 && sym.value == 1;
  EXPECT_TRUE(saw_constant);
}

TEST(RandomWalk, DeterministicUnderSeed) {
  auto run = [](std::uint64_t seed) {
    auto [s, ref] = catalog("set:2");
    use_desk_testing_budget(s);
    s.record_transcript(true);
    std::mt19937_64 rng(seed);
    auto v = random_walk_eq(reference_automaton(parse_sut_id("set:1")), s, RandomWalkConfig{}, rng);
    std::vector<DataWord> words;
    for (const auto& e : s.transcript()) words.push_back(e.word);
    return std::make_pair(words, v.counterexample);
  };
  EXPECT_EQ(run(42), run(42));
  EXPECT_NE(run(42).first, run(43).first);
}

TEST(SampleSuffixes, DistinctAndOfTheRequestedLength) {
  Alphabet sigma{{"a", 1}, {"b", 0}, {"c", 1}};
  std::mt19937_64 rng(9);
  for (std::size_t len = 1; len <= 9; ++len) {
    auto v = sample_suffixes(sigma, len, 50, rng);
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= 3;
    EXPECT_EQ(v.size(), std::min<std::size_t>(50, total));
    std::set<SymbolicSuffix> seen(v.begin(), v.end());
    EXPECT_EQ(seen.size(), v.size());
    for (const auto& w : v) EXPECT_EQ(w.size(), len);
  }
}

TEST(TaintedEq, FindsTheLockCode) {
  auto [s, ref] = catalog("lock:1,9,6,2");
  use_desk_testing_budget(s);
  std::mt19937_64 rng(1);
  auto v = tainted_eq(lock_without_beta(s), s, TaintedEqConfig{}, rng);
  ASSERT_FALSE(v.yes());
  EXPECT_EQ(to_string(*v.counterexample), "alpha(1) alpha(9) alpha(6) alpha(2) beta");
  EXPECT_TRUE(v.sut_accepts);
  // Suffix lengths 1..4 cost at most 2 + 4 + 8 + 16 explorations of few paths.
  EXPECT_LT(s.metrics(Phase::Testing).resets, 500u);
}

TEST(TaintedEq, FindsTheRepetition) {
  auto [s, ref] = catalog("rep:3:7");
  use_desk_testing_budget(s);
  std::mt19937_64 rng(1);
  auto v = tainted_eq(reject_all(s), s, TaintedEqConfig{}, rng);
  ASSERT_FALSE(v.yes());
  EXPECT_EQ(to_string(*v.counterexample), "alpha(7) alpha(7) alpha(7)");
}

TEST(TaintedEq, FifoCapacityNeedsSuffixLengthFour) {
  // fifo(1) and fifo(2) agree on every word up to length 3.
  auto h = reference_automaton(parse_sut_id("fifo:1"));
  auto ref2 = reference_automaton(parse_sut_id("fifo:2"));
  EXPECT_TRUE(bounded_equivalent(h, ref2, 3).equal);

  TaintedEqConfig upto3;
  upto3.max_suffix_len = 3;
  auto [s, ref] = catalog("fifo:2");
  std::mt19937_64 rng(1);
  EXPECT_TRUE(tainted_eq(h, s, upto3, rng).yes());

  TaintedEqConfig upto4;
  upto4.max_suffix_len = 4;
  auto v = tainted_eq(h, s, upto4, rng);
  ASSERT_FALSE(v.yes());
  EXPECT_EQ(v.counterexample->size(), 4u);
  EXPECT_NE(v.sut_accepts, accepts(h, *v.counterexample));
}

TEST(TaintedEq, ReferenceHypothesesPass) {
  for (std::string id : {"fifo:2", "set:2", "lock:1,9,6,2", "rep:3:7"}) {
    auto [s, ref] = catalog(id);
    use_desk_testing_budget(s);
    std::mt19937_64 rng(1);
    EXPECT_TRUE(tainted_eq(ref, s, TaintedEqConfig{}, rng).yes()) << id;
  }
}

// Soundness: a surfaced counterexample always separates SUT and hypothesis.
TEST(TaintedEq, CounterexamplesAreGenuine) {
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"fifo:3", "fifo:2"}, {"set:2", "set:1"}, {"set:3", "set:2"}, {"lock:1,9,6,2", "lock:1,9,6,3"}, {"rep:2:0", "rep:3:0"}};
  for (const auto& [sut, hyp] : pairs)
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      auto [s, ref] = catalog(sut);
      auto h = reference_automaton(parse_sut_id(hyp));
      use_desk_testing_budget(s);
      std::mt19937_64 rng(seed);
      auto v = tainted_eq(h, s, TaintedEqConfig{}, rng);
      ASSERT_FALSE(v.yes()) << sut << " vs " << hyp;
      EXPECT_EQ(v.sut_accepts, accepts(ref, *v.counterexample));
      EXPECT_NE(v.sut_accepts, accepts(h, *v.counterexample));
    }
}

TEST(TaintedEq, DeterministicUnderSeed) {
  auto run = [](std::uint64_t seed) {
    auto [s, ref] = catalog("set:3");
    use_desk_testing_budget(s);
    s.record_transcript(true);
    std::mt19937_64 rng(seed);
    auto v = tainted_eq(reference_automaton(parse_sut_id("set:2")), s, TaintedEqConfig{}, rng);
    std::vector<DataWord> words;
    for (const auto& e : s.transcript()) words.push_back(e.word);
    return std::make_pair(words, v.counterexample);
  };
  EXPECT_EQ(run(8), run(8));
}

TEST(TaintedEq, ExhaustedBudgetMeansYes) {
  auto [s, ref] = catalog("set:3");
  s.set_phase(Phase::Testing);
  s.set_budget(Phase::Testing, {1'000, 20});
  std::mt19937_64 rng(1);
  auto v = tainted_eq(ref, s, TaintedEqConfig{}, rng);
  EXPECT_TRUE(v.yes());
  EXPECT_TRUE(v.budget_exhausted);
  EXPECT_EQ(s.metrics(Phase::Testing).resets, 20u);
}
