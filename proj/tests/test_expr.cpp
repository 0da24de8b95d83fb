#include "ehhk/expr.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <string>

using ehhk::eval_expr;
using ehhk::ExprError;
using ehhk::Rational;

TEST(Expr, PrecedenceAndAssociativity) {
  EXPECT_EQ(eval_expr("1+2*3"), Rational(7));
  EXPECT_EQ(eval_expr("(1+2)*3"), Rational(9));
  EXPECT_EQ(eval_expr("8/4/2"), Rational(1));
  EXPECT_EQ(eval_expr("2-3-4"), Rational(-5));
  EXPECT_EQ(eval_expr("-2^2"), Rational(-4));
  EXPECT_EQ(eval_expr("2^-1"), Rational(1, 2));
  EXPECT_EQ(eval_expr(" 7 / 9 "), Rational(7, 9));
}

TEST(Expr, Variables) {
  EXPECT_EQ(eval_expr("(m-2)/(2*m)", {{"m", 3}}), Rational(1, 6));
  EXPECT_EQ(eval_expr("m*k*(2*m*k+1)", {{"m", 3}, {"k", 8}}), Rational(1176));
  EXPECT_EQ(eval_expr("(m+2)*(m-1)*(m^2+m-4)/8", {{"m", 5}}), Rational(91));
}

TEST(Expr, Errors) {
  EXPECT_THROW(eval_expr("1/0"), ExprError);
  EXPECT_THROW(eval_expr("1/(m-3)", {{"m", 3}}), ExprError);
  EXPECT_THROW(eval_expr("2^(1/2)"), ExprError);
  EXPECT_THROW(eval_expr("0^-1"), ExprError);
  EXPECT_THROW(eval_expr("q+1"), ExprError);
  EXPECT_THROW(eval_expr("(1+2"), ExprError);
  EXPECT_THROW(eval_expr("1+"), ExprError);
  EXPECT_THROW(eval_expr("3 4"), ExprError);
  EXPECT_THROW(eval_expr(""), ExprError);
}

// Random expression trees rendered to text agree with direct evaluation.
namespace {

struct Built {
  std::string text;
  Rational value;
};

Built build(ehhk::testing::Gen& g, int depth) {
  if (depth == 0 || g.integer(0, 3) == 0) {
    long v = g.integer(1, 9);
    return {std::to_string(v), Rational(v)};
  }
  Built l = build(g, depth - 1), r = build(g, depth - 1);
  switch (g.integer(0, 4)) {
    case 0: return {"(" + l.text + "+" + r.text + ")", l.value + r.value};
    case 1: return {"(" + l.text + "-" + r.text + ")", l.value - r.value};
    case 2: return {"(" + l.text + "*" + r.text + ")", l.value * r.value};
    case 3:
      if (r.value == 0) return l;
      return {"(" + l.text + "/" + r.text + ")", l.value / r.value};
    default: {
      long e = g.integer(-2, 3);
      if (l.value == 0 && e < 0) return l;
      Rational p = 1;
      for (long i = 0; i < (e < 0 ? -e : e); ++i) p *= l.value;
      return {"(" + l.text + ")^" + (e < 0 ? "(" + std::to_string(e) + ")" : std::to_string(e)),
              e < 0 ? Rational(1) / p : p};
    }
  }
}

}  // namespace

TEST(Expr, RandomTreesMatchDirectEvaluation) {
  ehhk::testing::Gen g(7);
  for (int i = 0; i < 500; ++i) {
    Built b = build(g, 4);
    EXPECT_EQ(eval_expr(b.text), b.value) << b.text;
  }
}
