#include <gtest/gtest.h>

#include "gbral/automaton_io.hpp"
#include "gbral/data_word.hpp"
#include "gbral/guard.hpp"

using namespace gbral;

TEST(Literal, NormalisesLaterVariableToTheLeft) {
  Literal l = Literal::eq(Var::x(1), Var::x(3));
  EXPECT_EQ(l.lhs, Var::x(3));
  EXPECT_EQ(l.rhs, Var::x(1));
  EXPECT_EQ(Literal::ne(Var::c(4), Var::p()).lhs, Var::p());
  EXPECT_LT(Var::c(100), Var::x(1));
  EXPECT_LT(Var::x(9), Var::v(1));
}

TEST(Guard, SortedAndDeduplicated) {
  Guard a{Literal::eq(Var::x(3), Var::x(1)), Literal::ne(Var::x(4), Var::x(2)), Literal::eq(Var::x(1), Var::x(3))};
  Guard b{Literal::ne(Var::x(2), Var::x(4)), Literal::eq(Var::x(3), Var::x(1))};
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 2u);
}

TEST(EvaluateGuard, EmptyConjunctionIsTrue) { EXPECT_TRUE(evaluate_guard({}, Guard::top())); }

TEST(EvaluateGuard, ReflexiveEquality) {
  EXPECT_TRUE(evaluate_guard({{Var::x(1), 5}, {Var::p(), 5}}, {Literal::eq(Var::p(), Var::x(1))}));
}

TEST(EvaluateGuard, LockConstantGuard) {
  // p = 1 from the combination lock, with p bound to 3.
  EXPECT_FALSE(evaluate_guard({{Var::p(), 3}}, {Literal::eq(Var::p(), Var::c(1))}));
  EXPECT_TRUE(evaluate_guard({{Var::p(), 1}}, {Literal::eq(Var::p(), Var::c(1))}));
}

TEST(EvaluateGuard, UnboundVariableThrows) {
  EXPECT_THROW(evaluate_guard({{Var::p(), 3}}, {Literal::eq(Var::p(), Var::x(2))}), UnboundVariable);
}

TEST(Structure, RejectsDuplicateSymbolsOrValues) {
  Structure s;
  s.add_constant("one", 1);
  s.add_constant("one", 1);
  EXPECT_THROW(s.add_constant("uno", 1), std::invalid_argument);
  EXPECT_THROW(s.add_constant("one", 2), std::invalid_argument);
  s.add_constant("zero", 0);
  EXPECT_EQ(s.values(), (std::vector<Value>{0, 1}));
}

TEST(DataWord, ActsAndValsDecomposeLosslessly) {
  Alphabet sigma{{"Push", 1}, {"Pop", 1}};
  DataWord w = parse_word("Push(7) Push(7) Pop(7) Push(5)", sigma);
  EXPECT_EQ(instantiate(w.actions(), w.values()), w);
  EXPECT_EQ(to_string(w), "Push(7) Push(7) Pop(7) Push(5)");
  EXPECT_EQ(parse_word("eps", sigma), DataWord{});
}

TEST(DataWord, ParameterlessActionsCarryZero) {
  Alphabet sigma{{"alpha", 1}, {"beta", 0}};
  DataWord w = parse_word("alpha(3) beta", sigma);
  EXPECT_EQ(w[1].value, 0u);
  EXPECT_EQ(w.data_values(), (std::vector<Value>{3}));
  EXPECT_THROW(parse_word("alpha", sigma), std::invalid_argument);
}

TEST(GuardText, RoundTrips) {
  Structure s;
  s.add_constant("one", 1);
  Guard g = parse_guard("p == x1 && p != c:one && x2 != x1", s);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(parse_guard(format_guard(g, s), s), g);
  EXPECT_TRUE(parse_guard("true", s).is_top());
  EXPECT_THROW(parse_guard("p == c:two", s), ParseError);
  EXPECT_THROW(parse_guard("p == x1 &&", s), ParseError);
  EXPECT_THROW(parse_guard("p < x1", s), ParseError);
}
