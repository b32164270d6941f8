#include <gtest/gtest.h>

#include <random>

#include "wh/jet.hpp"

using wh::cplx;
using wh::Jet;

TEST(Jet, LayoutIsGradedPrefix) {
  EXPECT_EQ(Jet::count(4, 3), 35);
  EXPECT_EQ(Jet::count(2, 2), 6);
  EXPECT_EQ(Jet::count(0, 3), 1);
  int last = 0;
  for (int k = 0; k < Jet::count(3, 3); ++k) {
    auto a = Jet::index_of(3, k);
    int deg = a[0] + a[1] + a[2] + a[3];
    EXPECT_GE(deg, last);
    last = deg;
  }
}

TEST(Jet, PolynomialDerivativesAreExact) {
  // f(x,y) = x^2 y + 3 y^3 at (1.5, -0.5)
  Jet x = Jet::variable(1.5, 0, 2, 3), y = Jet::variable(-0.5, 1, 2, 3);
  Jet f = x * x * y + 3.0 * y * y * y;
  EXPECT_NEAR(f.value().real(), 2.25 * -0.5 + 3 * -0.125, 1e-15);
  EXPECT_NEAR(f.derivative({1, 0, 0, 0}).real(), 2 * 1.5 * -0.5, 1e-14);
  EXPECT_NEAR(f.derivative({0, 1, 0, 0}).real(), 2.25 + 9 * 0.25, 1e-14);
  EXPECT_NEAR(f.derivative({2, 1, 0, 0}).real(), 2.0, 1e-14);
  EXPECT_NEAR(f.derivative({0, 3, 0, 0}).real(), 18.0, 1e-14);
  EXPECT_NEAR(f.derivative({1, 1, 0, 0}).real(), 3.0, 1e-14);
}

TEST(Jet, ElementaryFunctionsMatchClosedForms) {
  const double t = 0.7;
  Jet x = Jet::variable(t, 0, 1, 3);
  Jet e = exp(sin(x));
  // d/dt exp(sin t) = cos t exp(sin t)
  EXPECT_NEAR(e.derivative({1, 0, 0, 0}).real(), std::cos(t) * std::exp(std::sin(t)), 1e-14);
  // second derivative: (cos^2 - sin) exp(sin)
  EXPECT_NEAR(e.derivative({2, 0, 0, 0}).real(),
              (std::cos(t) * std::cos(t) - std::sin(t)) * std::exp(std::sin(t)), 1e-13);
  Jet p = pow(x * x + 1.0, 0.3);
  double d1 = 0.3 * std::pow(t * t + 1, -0.7) * 2 * t;
  EXPECT_NEAR(p.derivative({1, 0, 0, 0}).real(), d1, 1e-14);
  Jet l = log(x) * x;  // (t log t)'' = 1/t
  EXPECT_NEAR(l.derivative({2, 0, 0, 0}).real(), 1 / t, 1e-13);
  Jet q = 1.0 / (x + 2.0);  // third derivative -6/(t+2)^4
  EXPECT_NEAR(q.derivative({3, 0, 0, 0}).real(), -6 / std::pow(t + 2, 4), 1e-13);
}

TEST(Jet, PartialLowersValidOrder) {
  Jet x = Jet::variable(0.2, 0, 2, 2), y = Jet::variable(0.4, 1, 2, 2);
  Jet f = exp(x * y);
  Jet fx = f.partial(0);
  EXPECT_EQ(fx.order(), 1);
  EXPECT_NEAR(fx.value().real(), 0.4 * std::exp(0.08), 1e-15);
  Jet fxy = fx.partial(1);
  EXPECT_EQ(fxy.order(), 0);
  EXPECT_NEAR(fxy.value().real(), (1 + 0.08) * std::exp(0.08), 1e-14);
  EXPECT_THROW(fxy.partial(0), wh::Error);
}

TEST(Jet, ProductRuleProperty) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    double a = U(rng), b = U(rng);
    Jet x = Jet::variable(a, 0, 2, 3), y = Jet::variable(b, 1, 2, 3);
    Jet f = sin(x + 2.0 * y), g = exp(x * y);
    Jet fg = f * g;
    // d/dx (fg) = f_x g + f g_x
    cplx lhs = fg.partial(0).value();
    cplx rhs = f.partial(0).value() * g.value() + f.value() * g.partial(0).value();
    EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-14);
  }
}

TEST(Jet, MixedOrdersTakeMinimum) {
  Jet x = Jet::variable(1.0, 0, 1, 3);
  Jet y = Jet::variable(1.0, 0, 1, 1);
  EXPECT_EQ((x * y).order(), 1);
  EXPECT_EQ((x + y).order(), 1);
  Jet c = Jet::constant(2.0, 0, 0);
  EXPECT_EQ((x * c).order(), 3);
}
