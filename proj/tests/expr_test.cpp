#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "nullgeo/errors.hpp"
#include "nullgeo/expr.hpp"

using namespace nullgeo;

namespace {

const std::vector<std::string> kXY{"x", "y"};

double eval_at(const std::string& text, double x, double y, const Bindings& b = {}) {
  std::vector<std::string> params;
  for (const auto& [k, v] : b) params.push_back(k);
  std::vector<double> p{x, y};
  return Expression::parse(text, kXY, params).eval(p, b);
}

// Random smooth expression over x0..x2, kept away from domain edges.
std::string random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 8);
  std::uniform_real_distribution<double> num(0.5, 2.0);
  auto leaf = [&]() -> std::string {
    if (rng() % 3 == 0) return std::to_string(num(rng)).substr(0, 5);
    return "x" + std::to_string(rng() % 3);
  };
  switch (pick(rng)) {
    case 0:
    case 1:
      return leaf();
    case 2:
      return "(" + random_expr(rng, depth - 1) + " + " + random_expr(rng, depth - 1) + ")";
    case 3:
      return "(" + random_expr(rng, depth - 1) + " - " + random_expr(rng, depth - 1) + ")";
    case 4:
      return "(" + random_expr(rng, depth - 1) + ")*(" + random_expr(rng, depth - 1) + ")";
    case 5:
      return "(" + random_expr(rng, depth - 1) + ")/(2 + sin(" + random_expr(rng, depth - 1) + "))";
    case 6:
      return "sin(" + random_expr(rng, depth - 1) + ")";
    case 7:
      return "sqrt(1 + (" + random_expr(rng, depth - 1) + ")^2)";
    default:
      return "exp(cos(" + random_expr(rng, depth - 1) + "))";
  }
}

}  // namespace

TEST(ExprTest, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(eval_at("1 + 2*3", 0, 0), 7.0);
  EXPECT_DOUBLE_EQ(eval_at("2*x^3", 2, 0), 16.0);
  EXPECT_DOUBLE_EQ(eval_at("-x^2", 3, 0), -9.0);
  EXPECT_DOUBLE_EQ(eval_at("8/4/2", 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(eval_at("x - y - 1", 5, 2), 2.0);
  EXPECT_DOUBLE_EQ(eval_at("(x + y)*(x - y)", 3, 2), 5.0);
}

TEST(ExprTest, FunctionsAndParams) {
  Bindings b{{"theta", 0.5}};
  EXPECT_NEAR(eval_at("x*sin(theta) + y*cos(theta)", 2, 3, b), 2 * std::sin(0.5) + 3 * std::cos(0.5), 1e-15);
  EXPECT_NEAR(eval_at("sqrt(x)", 2, 0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(eval_at("exp(-y)", 0, 1), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(eval_at("x^(1/2)", 9, 0), 3.0, 1e-14);
}

TEST(ExprTest, ParseErrorReportsOffset) {
  try {
    Expression::parse("x +* y", kXY);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  EXPECT_THROW(Expression::parse("", kXY), ParseError);
  EXPECT_THROW(Expression::parse("(x + y", kXY), ParseError);
  EXPECT_THROW(Expression::parse("x y", kXY), ParseError);
  // exponents are integer or rational literals
  EXPECT_THROW(Expression::parse("x^y", kXY), ParseError);
}

TEST(ExprTest, UnknownSymbol) {
  try {
    Expression::parse("x + w", kXY);
    FAIL() << "expected an unknown symbol error";
  } catch (const UnknownSymbolError& e) {
    EXPECT_EQ(e.symbol(), "w");
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(ExprTest, DomainErrors) {
  EXPECT_THROW(eval_at("sqrt(x)", -1, 0), DomainError);
  EXPECT_THROW(eval_at("1/(x - y)", 1, 1), DomainError);
  EXPECT_THROW(eval_at("x^(1/2)", -4, 0), DomainError);
  try {
    eval_at("1 + sqrt(x - 2)", 1, 0);
  } catch (const DomainError& e) {
    EXPECT_NE(e.subexpression().find("sqrt"), std::string::npos);
  }
}

TEST(ExprTest, UnboundParamIsAnError) {
  std::vector<std::string> params{"k"};
  Expression e = Expression::parse("k*x", kXY, params);
  std::vector<double> p{1, 2};
  EXPECT_THROW(e.eval(p, {}), Error);
}

TEST(ExprTest, RenderRoundTrip) {
  std::mt19937_64 rng(5);
  std::vector<std::string> c{"x0", "x1", "x2"};
  for (int i = 0; i < 50; ++i) {
    Expression e = Expression::parse(random_expr(rng, 4), c);
    Expression back = Expression::parse(e.render(), c);
    EXPECT_TRUE(e.structurally_equal(back)) << e.render();
  }
}

TEST(ExprTest, JetOfKnownFunction) {
  // f = x^2 y + sin(y): grad = (2xy, x^2 + cos y), hess = [[2y, 2x], [2x, -sin y]]
  Expression e = Expression::parse("x^2*y + sin(y)", kXY);
  std::vector<double> p{1.5, 0.7};
  Jet2 j = e.eval_jet2(p, {});
  EXPECT_NEAR(j.value, 1.5 * 1.5 * 0.7 + std::sin(0.7), 1e-14);
  EXPECT_NEAR(j.grad(0), 2 * 1.5 * 0.7, 1e-14);
  EXPECT_NEAR(j.grad(1), 1.5 * 1.5 + std::cos(0.7), 1e-14);
  EXPECT_NEAR(j.hess(0, 0), 2 * 0.7, 1e-14);
  EXPECT_NEAR(j.hess(0, 1), 2 * 1.5, 1e-14);
  EXPECT_NEAR(j.hess(1, 0), 2 * 1.5, 1e-14);
  EXPECT_NEAR(j.hess(1, 1), -std::sin(0.7), 1e-14);
}

// Derivatives from the jets against central differences of plain values.
TEST(ExprTest, JetsAgreeWithFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::vector<std::string> c{"x0", "x1", "x2"};
  double worst_g = 0.0, worst_h = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    Expression e = Expression::parse(random_expr(rng, 4), c);
    std::vector<double> p{coord(rng), coord(rng), coord(rng)};
    Jet2 j = e.eval_jet2(p, {});
    const double h = 1e-5;
    Vec g(3);
    Mat hs(3, 3);
    for (int k = 0; k < 3; ++k) {
      auto q = p, r = p;
      q[k] += h;
      r[k] -= h;
      g(k) = (e.eval(q, {}) - e.eval(r, {})) / (2 * h);
      Jet2 jq = e.eval_jet1(q, {}), jr = e.eval_jet1(r, {});
      hs.row(k) = ((jq.grad - jr.grad) / (2 * h)).transpose();
    }
    worst_g = std::max(worst_g, (j.grad - g).norm() / std::max(1.0, g.norm()));
    worst_h = std::max(worst_h, (j.hess - hs).norm() / std::max(1.0, hs.norm()));
  }
  EXPECT_LT(worst_g, 1e-6);
  EXPECT_LT(worst_h, 1e-5);
}

TEST(ExprTest, ConstantZeroDetection) {
  EXPECT_TRUE(Expression::parse("0", kXY).is_constant_zero());
  EXPECT_FALSE(Expression::parse("x", kXY).is_constant_zero());
  EXPECT_TRUE(Expression::constant(0.0, kXY).is_constant_zero());
}
