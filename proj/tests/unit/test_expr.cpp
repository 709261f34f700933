#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "subriemann/dual.hpp"
#include "subriemann/errors.hpp"
#include "subriemann/expr.hpp"

using namespace subriemann;

namespace {

const std::vector<std::string> kXYT = {"x1", "y1", "t"};

double ev(const std::string& s, const std::vector<std::string>& vars, std::vector<double> x) {
  return parse(s, vars)(x);
}

}  // namespace

TEST(Parse, MinimalProduct) {
  const Expr e = parse("2*y1", kXYT);
  ASSERT_EQ(e.root().op, Expr::Op::Mul);
  EXPECT_EQ(e.root().lhs->op, Expr::Op::Const);
  EXPECT_EQ(e.root().lhs->value, 2.0);
  EXPECT_EQ(e.root().rhs->op, Expr::Op::Var);
  EXPECT_EQ(e.root().rhs->var, 1u);
}

TEST(Parse, GaugeNorm) {
  const Expr e = parse("(x1^2+y1^2)^2 + t^2", kXYT);
  EXPECT_EQ(e.root().op, Expr::Op::Add);
  EXPECT_EQ(e.root().lhs->op, Expr::Op::Pow);
  EXPECT_DOUBLE_EQ(e(std::vector<double>{1.0, 1.0, 3.0}), 4.0 + 9.0);
}

TEST(Parse, TruncatedInputReportsOffset) {
  try {
    parse("2*(", kXYT);
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 3u);
    EXPECT_FALSE(e.expected().empty());
  }
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("", kXYT), SyntaxError);
  EXPECT_THROW(parse("x1 +* 2", kXYT), SyntaxError);
  EXPECT_THROW(parse("(x1", kXYT), SyntaxError);
  EXPECT_THROW(parse("x1 y1", kXYT), SyntaxError);
  EXPECT_THROW(parse("x1^y1", kXYT), SyntaxError);
  try {
    parse("x1 + zz", kXYT);
    FAIL();
  } catch (const UnknownVariable& e) {
    EXPECT_EQ(e.name(), "zz");
  }
  const std::vector<std::string> dup = {"x", "x"};
  EXPECT_THROW(parse("x", dup), Error);
}

TEST(Parse, PrecedenceAndAssociativity) {
  EXPECT_DOUBLE_EQ(ev("-x1^2", kXYT, {3, 0, 0}), -9.0);
  EXPECT_DOUBLE_EQ(ev("2^3^2", kXYT, {0, 0, 0}), 64.0);
  EXPECT_DOUBLE_EQ(ev("8/4/2", kXYT, {0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(ev("1-2-3", kXYT, {0, 0, 0}), -4.0);
  EXPECT_DOUBLE_EQ(ev("1+2*3", kXYT, {0, 0, 0}), 7.0);
  EXPECT_DOUBLE_EQ(ev("(1+2)*3", kXYT, {0, 0, 0}), 9.0);
  EXPECT_DOUBLE_EQ(ev("x1^-1", kXYT, {4, 0, 0}), 0.25);
  EXPECT_DOUBLE_EQ(ev("2.5e1 + 1E-1", kXYT, {0, 0, 0}), 25.1);
  EXPECT_DOUBLE_EQ(ev("sqrt(x1)*exp(0)+log(1)+cos(0)", kXYT, {4, 0, 0}), 3.0);
}

TEST(Eval, Basics) {
  const std::vector<std::string> x = {"x1"};
  const std::vector<std::string> t = {"t"};
  EXPECT_DOUBLE_EQ(ev("x1+2", x, {3}), 5.0);
  EXPECT_DOUBLE_EQ(ev("sin(t)", t, {0}), 0.0);
  EXPECT_THROW(ev("1/x1", x, {0}), DomainError);
  EXPECT_THROW(ev("sqrt(x1)", x, {-1}), DomainError);
  EXPECT_THROW(ev("log(x1)", x, {0}), DomainError);
  EXPECT_THROW(ev("x1^0.5", x, {-1}), DomainError);
  EXPECT_THROW(ev("x1^-2", x, {0}), DomainError);
  EXPECT_DOUBLE_EQ(ev("x1^3", x, {-2}), -8.0);
}

TEST(Eval, DomainErrorNamesLocation) {
  const std::vector<std::string> x = {"x1"};
  try {
    ev("1 + 1/x1", x, {0});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 5"), std::string::npos) << e.what();
  }
}

TEST(RoundTrip, PrintReparses) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const Expr e = oracle::random_expr(rng, 3, 4);
    const std::string s = e.to_string(kXYT);
    const Expr back = parse(s, kXYT);
    EXPECT_TRUE(back.structurally_equal(e)) << s << " -> " << back.to_string(kXYT);
  }
  for (const char* s : {"-x1^2", "(x1-y1)-(t-1)", "x1/(y1*t)", "2^3^2", "-(-2)", "x1^-1.5",
                        "sin(-x1)*-3"}) {
    const Expr e = parse(s, kXYT);
    EXPECT_TRUE(parse(e.to_string(kXYT), kXYT).structurally_equal(e)) << s;
  }
}

TEST(DirectionalDerivative, Fixtures) {
  const std::vector<std::string> x = {"x1"};
  const std::vector<double> p3 = {3}, d1 = {1};
  EXPECT_DOUBLE_EQ(parse("x1^2", x).directional_derivative(p3, d1), 6.0);
  EXPECT_EQ(parse("4.5", x).directional_derivative(p3, d1), 0.0);
  const std::vector<std::string> xy = {"x1", "y1"};
  const std::vector<double> p = {2, 5}, d = {1, 1};
  EXPECT_NEAR(parse("x1*y1", xy).directional_derivative(p, d), 7.0, 1e-12);
}

TEST(DirectionalDerivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 100) {
    const Expr e = oracle::random_expr(rng, 3, 4);
    const Vec p = oracle::random_point(rng, 3);
    const Vec d = oracle::random_point(rng, 3);
    const double ad = e.directional_derivative(as_span(p), as_span(d));
    const double fd = oracle::fd_directional([&](const Vec& q) { return e(as_span(q)); }, p, d);
    EXPECT_LE(std::fabs(ad - fd), 1e-6 * std::max(1.0, std::fabs(fd))) << e.to_string(kXYT);
    ++checked;
  }
}

TEST(DirectionalDerivative, Linearity) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    const Expr e = oracle::random_expr(rng, 3, 4);
    const Vec p = oracle::random_point(rng, 3);
    const Vec u = oracle::random_point(rng, 3);
    const Vec v = oracle::random_point(rng, 3);
    const double a = 0.7, b = -1.3;
    const Vec w = a * u + b * v;
    const double lhs = e.directional_derivative(as_span(p), as_span(w));
    const double rhs = a * e.directional_derivative(as_span(p), as_span(u)) +
                       b * e.directional_derivative(as_span(p), as_span(v));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::fabs(lhs)));
  }
}

TEST(Dual, ProductRuleAndNesting) {
  const Real1 a(3.0, 1.0), b(2.0, 0.5);
  const Real1 p = a * b;
  EXPECT_DOUBLE_EQ(p.v, 6.0);
  EXPECT_DOUBLE_EQ(p.d, 1.0 * 2.0 + 3.0 * 0.5);
  // d^2/ds^2 sin(s)^3 at s = 0.4, exact second derivative from two nested layers
  const double s = 0.4;
  const Real2 x(Real1(s, 1.0), Real1(1.0, 0.0));
  const Real2 y = ipow(sin(x), 3);
  const double exact = 6.0 * std::sin(s) * std::cos(s) * std::cos(s) - 3.0 * std::pow(std::sin(s), 3);
  EXPECT_NEAR(y.d.d, exact, 1e-14);
}
