#include <gtest/gtest.h>

#include <random>
#include <set>

#include "gbral/solver.hpp"

using namespace gbral;

namespace {

Var x(std::uint32_t i) { return Var::x(i); }
Literal eq(Var a, Var b) { return Literal::eq(a, b); }
Literal ne(Var a, Var b) { return Literal::ne(a, b); }

// Exhaustive search over `domain`, pruning a branch as soon as a literal
// whose variables are all assigned fails.
bool brute_force_sat(const Guard& g, const std::vector<Var>& vars, const std::vector<Value>& domain) {
  Valuation nu;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    for (const auto& l : g.literals())
      if (nu.binds(l.lhs) && nu.binds(l.rhs) && !evaluate(nu, l)) return false;
    if (i == vars.size()) return true;
    for (Value d : domain) {
      nu.bind(vars[i], d);
      if (rec(i + 1)) return true;
    }
    nu.unbind(vars[i]);
    return false;
  };
  return rec(0);
}

}  // namespace

TEST(Satisfiable, DirectContradiction) {
  EXPECT_FALSE(satisfiable(Guard{eq(x(3), x(1)), ne(x(3), x(1))}));
}

TEST(Satisfiable, MergedDistinctConstants) {
  Guard g{eq(x(2), x(1)), eq(x(2), Var::c(1)), eq(x(1), Var::c(2))};
  EXPECT_FALSE(satisfiable(g));
  EXPECT_FALSE(brute_force_sat(g, {x(1), x(2)}, {1, 2, 3}));
}

TEST(Satisfiable, FixedBindingsPinVariables) {
  Valuation fixed{{x(1), 5}, {x(2), 7}};
  EXPECT_FALSE(satisfiable(Guard{eq(x(3), x(1)), eq(x(3), x(2))}, fixed));
  EXPECT_TRUE(satisfiable(Guard{eq(x(3), x(1)), ne(x(3), x(2))}, fixed));
  EXPECT_FALSE(satisfiable(Guard{eq(x(1), Var::c(7))}, fixed));
}

TEST(Satisfiable, AgreesWithBruteForce) {
  std::mt19937 rng(12345);
  const std::vector<Value> consts{10, 11};
  std::vector<Value> domain{0, 1, 2, 3, 4, 5};
  domain.insert(domain.end(), consts.begin(), consts.end());
  int sat = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    std::size_t nvars = 1 + rng() % 5;
    std::size_t nconsts = rng() % 3;
    std::vector<Var> pool;
    for (std::uint32_t i = 1; i <= nvars; ++i) pool.push_back(x(i));
    for (std::size_t c = 0; c < nconsts; ++c) pool.push_back(Var::c(consts[c]));
    Guard g;
    std::size_t nlits = 1 + rng() % 6;
    for (std::size_t i = 0; i < nlits; ++i)
      g.add(Literal::make(pool[rng() % pool.size()], pool[rng() % pool.size()], rng() % 2 == 0));
    std::vector<Var> vars(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(nvars));
    bool expected = brute_force_sat(g, vars, domain);
    ASSERT_EQ(satisfiable(g), expected) << to_string(g);
    sat += expected;
  }
  EXPECT_GT(sat, 1000);
  EXPECT_LT(sat, 9000);
}

TEST(FindModel, TopHasAModel) {
  Valuation fixed{{x(1), 5}, {x(2), 7}};
  auto m = find_model(DnfPredicate::top(), fixed, {x(3), x(4)});
  ASSERT_TRUE(m);
  EXPECT_EQ(m->at(x(1)), 5u);
  EXPECT_TRUE(m->binds(x(3)) && m->binds(x(4)));
}

TEST(FindModel, EqualitiesForceReuse) {
  Valuation fixed{{x(1), 5}, {x(2), 7}};
  auto m = find_model({{Guard{eq(x(3), x(1)), eq(x(4), x(2))}}}, fixed);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->at(x(3)), 5u);
  EXPECT_EQ(m->at(x(4)), 7u);
}

TEST(FindModel, FreshValueAvoidsConstants) {
  Structure s;
  auto m = find_model({{Guard{ne(x(1), Var::c(1))}}}, {});
  ASSERT_TRUE(m);
  EXPECT_EQ(m->at(x(1)), 0u);
  auto m2 = find_model(DnfPredicate::top(), {}, {x(1)}, {0, 1});
  ASSERT_TRUE(m2);
  EXPECT_EQ(m2->at(x(1)), 2u);
}

TEST(FindModel, BottomHasNoModel) { EXPECT_FALSE(find_model(DnfPredicate::bottom(), {}, {x(1)})); }

TEST(Frontier, ExcludingTopIsUnsatisfiable) {
  Frontier f;
  f.exclude(Guard::top());
  EXPECT_FALSE(f.find_model({}, {x(1)}));
}

TEST(Frontier, ExcludedEqualityYieldsDisequalModel) {
  Frontier f;
  f.exclude(Guard{eq(x(1), x(2))});
  auto m = f.find_model({}, {x(1), x(2)});
  ASSERT_TRUE(m);
  EXPECT_NE(m->at(x(1)), m->at(x(2)));
}

// The three iterations of the FIFO walkthrough for prefix Push(5) Push(7)
// and suffix Pop Pop.
TEST(Frontier, FifoWalkthroughSequence) {
  Valuation fixed{{x(1), 5}, {x(2), 7}};
  std::vector<Var> free{x(3), x(4)};
  Frontier g;
  auto n1 = g.find_model(fixed, free);
  ASSERT_TRUE(n1);
  EXPECT_EQ(n1->at(x(3)), 0u);
  EXPECT_EQ(n1->at(x(4)), 1u);
  g.exclude(Guard{ne(x(3), x(1))});
  auto n2 = g.find_model(fixed, free);
  ASSERT_TRUE(n2);
  EXPECT_EQ(n2->at(x(3)), 5u);
  EXPECT_EQ(n2->at(x(4)), 0u);
  g.exclude(Guard{eq(x(3), x(1)), ne(x(4), x(2))});
  auto n3 = g.find_model(fixed, free);
  ASSERT_TRUE(n3);
  EXPECT_EQ(n3->at(x(3)), 5u);
  EXPECT_EQ(n3->at(x(4)), 7u);
  g.exclude(Guard{eq(x(3), x(1)), eq(x(4), x(2))});
  EXPECT_FALSE(g.find_model(fixed, free));
}

// Iterating find_model and blocking the model's full equality type visits
// every equality type exactly once.
TEST(Frontier, EnumeratesEachEqualityTypeOnce) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (std::vector<Value> consts : {std::vector<Value>{}, std::vector<Value>{3}, std::vector<Value>{3, 8}}) {
      std::vector<Var> vars;
      for (std::uint32_t i = 1; i <= n; ++i) vars.push_back(x(i));
      std::vector<Var> typed = vars;
      for (Value c : consts) typed.push_back(Var::c(c));

      std::set<Guard> expected;
      std::vector<Value> domain{0, 1, 2, 4, 5};
      domain.insert(domain.end(), consts.begin(), consts.end());
      Valuation nu;
      std::function<void(std::size_t)> all = [&](std::size_t i) {
        if (i == n) {
          expected.insert(equality_type(nu, typed));
          return;
        }
        for (Value d : domain) {
          nu.bind(vars[i], d);
          all(i + 1);
        }
      };
      all(0);

      Frontier f;
      std::set<Guard> seen;
      while (auto m = f.find_model({}, vars, consts)) {
        Guard type = equality_type(*m, typed);
        ASSERT_TRUE(seen.insert(type).second) << to_string(type);
        f.exclude(type);
      }
      EXPECT_EQ(seen, expected) << "n=" << n << " consts=" << consts.size();
    }
  }
}

TEST(DnfPredicate, SatisfiablePartDropsDeadDisjuncts) {
  Valuation fixed{{x(1), 5}};
  DnfPredicate h{{Guard{eq(x(1), Var::c(4))}, Guard{ne(x(2), x(1))}}};
  auto part = satisfiable_part(h, fixed);
  ASSERT_EQ(part.disjuncts.size(), 1u);
  EXPECT_EQ(part.disjuncts[0], (Guard{ne(x(2), x(1))}));
}
