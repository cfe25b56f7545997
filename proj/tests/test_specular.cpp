#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "speculus/specular.hpp"

using namespace speculus;
using namespace fixtures;

namespace {

// Closed form (a*b - 1 + sqrt((a^2+1)(b^2+1))) / (a + b), in long double.
double f1(double a, double b) {
  long double A = a, B = b;
  long double r = (A * B - 1 + std::sqrt((A * A + 1) * (B * B + 1))) / (A + B);
  return static_cast<double>(r);
}

std::vector<double> P(double x, double y) { return {x, y}; }

}  // namespace

TEST(ACombine, Values) {
  EXPECT_NEAR(a_combine(1, 0), std::sqrt(2.0) - 1, 1e-15);
  EXPECT_NEAR(a_combine(2, -1), std::sqrt(10.0) - 3, 1e-15);
  EXPECT_EQ(a_combine(3, -3), 0.0);
  EXPECT_NEAR(a_combine(2, 0), (std::sqrt(5.0) - 1) / 2, 1e-15);
  for (double m : {-7.5, -1.0, 0.0, 0.3, 12.0}) EXPECT_EQ(a_combine(m, m), m);
}

TEST(ACombine, MatchesClosedForm) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int i = 0; i < 10000; ++i) {
    double a = d(rng), b = d(rng);
    if (std::abs(a + b) <= 1e-6) continue;
    double ref = f1(a, b);
    EXPECT_NEAR(a_combine(a, b), ref, 1e-12 * (1 + std::abs(ref))) << a << " " << b;
  }
}

TEST(ACombine, SymmetricBracketedAntisymmetric) {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> d(-1e3, 1e3);
  for (int i = 0; i < 10000; ++i) {
    double a = d(rng), b = d(rng);
    double r = a_combine(a, b);
    EXPECT_EQ(r, a_combine(b, a));
    EXPECT_LE(std::min(a, b), r);
    EXPECT_GE(std::max(a, b), r);
    EXPECT_EQ(a_combine(a, -a), 0.0);
    EXPECT_EQ(a_combine(-a, -b), -r);
  }
}

TEST(Semi, Examples) {
  auto abs1 = from_expression("abs(x)", kX);
  std::vector<double> z{0.0};
  auto s = semi_derivatives(abs1, z, 0);
  EXPECT_EQ(s.right, 1.0);
  EXPECT_EQ(s.left, -1.0);

  auto u = from_expression("abs(2*x - y) + abs(x - 3)", kXY);
  auto p = P(3, 6);
  auto t = semi_derivatives(u, p, 0);
  EXPECT_EQ(t.right, 3.0);
  EXPECT_EQ(t.left, -3.0);

  auto w = from_expression("(1/2)*(x + abs(x)) + (1/2)*y + (3/2)*abs(y)", kXY);
  auto o = P(0, 0);
  auto sy = semi_derivatives(w, o, 1);
  EXPECT_EQ(sy.right, 2.0);
  EXPECT_EQ(sy.left, -1.0);
}

TEST(Partial, Examples) {
  auto u = from_expression("abs(2*x - y) + abs(x - 3)", kXY);
  auto p = P(1, 1);
  EXPECT_EQ(specular_partial(u, p, 0), 1.0);
  auto dq = specular_field(q(), 0);
  std::vector<double> z{0.0};
  EXPECT_EQ(specular_partial(dq, z, 0), 0.0);
}

TEST(Field, NineCaseTable) {
  auto u = from_expression("abs(2*x - y) + abs(x - 3)", kXY);
  auto ux = specular_field(u, 0);
  // (point, value) with 2x - y sign and x - 3 sign as in the table
  struct Case {
    double x, y, v;
  } cases[] = {
      {4, 1, 3},                   // + +
      {4, 8, a_combine(3, -1)},    // 0 +
      {1, 1, 1},                   // + -
      {1, 2, a_combine(1, -3)},    // 0 -
      {3, 6, a_combine(3, -3)},    // 0 0
      {3, 1, a_combine(3, 1)},     // + 0
      {4, 9, -1},                  // - +
      {3, 9, a_combine(-1, -3)},   // - 0
      {1, 5, -3},                  // - -
  };
  for (auto& c : cases) {
    auto p = P(c.x, c.y);
    EXPECT_NEAR(evaluate(ux, p), c.v, 1e-12) << c.x << "," << c.y;
  }
}

TEST(Field, SmoothIsClassical) {
  auto u = from_expression("x^3 - 2*x*y + y^2", kXY);
  auto ux = specular_field(u, 0);
  ASSERT_EQ(ux.branches.size(), 1u);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3, 3);
  auto dx = diff(parse("x^3 - 2*x*y + y^2", kXY), 0);
  for (int i = 0; i < 1000; ++i) {
    auto p = P(d(rng), d(rng));
    double c = eval(dx, p);
    EXPECT_NEAR(specular_partial(u, p, 0), c, 1e-12 * (1 + std::abs(c)));
    EXPECT_NEAR(evaluate(ux, p), c, 1e-12 * (1 + std::abs(c)));
  }
}

TEST(Reflection, Residuals) {
  std::vector<double> h{0.5}, z{0.0};
  EXPECT_EQ(odd_reflection_check(from_expression("abs(x)", kX), h, 0), 0.0);
  EXPECT_EQ(odd_reflection_check(from_expression("cos(x)", kX), z, 0), 0.0);
  EXPECT_LE(odd_reflection_check(from_expression("elu(x)", kX), z, 0), 1e-15);
}

TEST(Phototangent, Examples) {
  auto a = phototangent(from_expression("abs(x)", kX), 0);
  EXPECT_EQ(a.left_slope, -1.0);
  EXPECT_EQ(a.right_slope, 1.0);
  EXPECT_TRUE(a.continuous);
  auto s = phototangent(from_expression("sgn(x)", kX), 0);
  EXPECT_EQ(s.left_value, -1.0);
  EXPECT_EQ(s.right_value, 1.0);
  EXPECT_EQ(s.center, 0.0);
  EXPECT_FALSE(s.continuous);
  auto t = phototangent(q(), 1);
  EXPECT_EQ(t.left_slope, 1.0);
  EXPECT_EQ(t.right_slope, 1.0);
}

TEST(Phototangent, Linearity) {
  auto u = from_expression("abs(x - 1) + elu(x)", kX);
  auto v = from_expression("(1/2)*x*abs(x) - abs(x)", kX);
  auto w = from_expression("2*(abs(x - 1) + elu(x)) - 3*((1/2)*x*abs(x) - abs(x))", kX);
  for (double x0 : {0.0, 1.0, 0.4}) {
    auto pu = phototangent(u, x0), pv = phototangent(v, x0), pw = phototangent(w, x0);
    for (double y : {x0 - 0.7, x0 - 0.01, x0, x0 + 0.2, x0 + 1.5})
      EXPECT_NEAR(pw(y), 2 * pu(y) - 3 * pv(y), 1e-12) << x0 << " " << y;
  }
}

TEST(Ftc, Condition) {
  EXPECT_TRUE(ftc_condition_check(from_expression("sgn(x)", kX)));
  EXPECT_FALSE(ftc_condition_check(heaviside(0.5)));
  EXPECT_TRUE(ftc_condition_check(heaviside(std::sqrt(2.0) - 1)));
}

TEST(Regularity, Chain) {
  EXPECT_EQ(specular_order_1d(q()), 2);
  EXPECT_EQ(specular_order_1d(from_expression("elu(x)", kX)), 2);
  EXPECT_EQ(specular_order_1d(from_expression("abs(x)", kX)), 1);
  EXPECT_LT(specular_order_1d(heaviside(0.5)), 1);
  EXPECT_EQ(specular_order_1d(heaviside(std::sqrt(2.0) - 1)), 0);
}

TEST(S2, QPlusQ) {
  auto u = from_expression("(1/2)*x*abs(x) + (1/2)*y*abs(y)", kXY);
  auto r = s2_membership(u);
  EXPECT_EQ(r.verdict, S2Verdict::S2);
  EXPECT_LE(r.symmetry_residual, 1e-9);
  auto uxx = specular_field(specular_field(u, 0), 0);
  for (auto p : {P(-2, 1), P(0, 3), P(1.5, -1)}) EXPECT_EQ(evaluate(uxx, p), (p[0] > 0) - (p[0] < 0));
}

TEST(S2, CounterexampleFails) {
  auto r = s2_membership(counterexample_printed_u());
  EXPECT_NE(r.verdict, S2Verdict::S2);
  EXPECT_FALSE(r.continuous);
  EXPECT_EQ(r.failing_forms.size(), 2u);
}

TEST(S2, SmoothFixtures) {
  for (const char* s : {"x^3 - 2*x*y + y^2", "sin(x)*cos(y)", "exp(x - y) + x*y"}) {
    auto r = s2_membership(from_expression(s, kXY));
    EXPECT_EQ(r.verdict, S2Verdict::S2) << s;
    EXPECT_LE(r.symmetry_residual, 1e-9) << s;
  }
}
