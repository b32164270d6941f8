#include <gtest/gtest.h>

#include <random>

#include "wh/dirichlet.hpp"

using namespace wh;

TEST(Lift, ClosedFormMatchesQuadrature) {
  // the incomplete-gamma lift against direct product quadrature of the defining integral
  for (double a : {0.2, 0.5, 0.85}) {
    for (double beta : {0.5, 1.0, 2.5}) {
      auto w = Profile::poly_exp({1.0, -0.7, 0.3}, beta);
      auto u = WeightedFunction::lift(w, a, 1.0);
      for (double x : {0.0, 0.01, 0.7, 3.0, 11.0}) {
        cplx direct = x == 0 ? w(0.0) / std::tgamma(a + 1)
                             : quad::power_weighted(a - 1, x, [&](double s) { return std::exp(-s) * w(x - s); }, 0.5, 40) /
                                   std::tgamma(a) * std::pow(x, -a);
        EXPECT_NEAR(std::abs(u.v(x) - direct), 0.0, 1e-11 * (1 + std::abs(direct))) << a << " " << beta << " " << x;
      }
    }
  }
}

TEST(Lift, ExponentialDataHasIncompleteGammaForm) {
  const double a = 0.4, sigma = 2.0, beta = 1.0;
  auto u = WeightedFunction::lift(Profile::exponential(beta), a, sigma);
  for (double x : {0.1, 1.0, 5.0}) {
    double expect = std::exp(-beta * x) * std::pow(sigma - beta, -a) * boost::math::gamma_p(a, (sigma - beta) * x);
    EXPECT_NEAR(std::abs(u(x) - expect), 0.0, 1e-13);
  }
  // sigma = beta: e^{-x} x^a / Gamma(a+1)
  auto eq = WeightedFunction::lift(Profile::exponential(1.0), a, 1.0);
  EXPECT_NEAR(std::abs(eq(2.0) - std::exp(-2.0) * std::pow(2.0, a) / std::tgamma(a + 1)), 0.0, 1e-14);
}

TEST(Lift, DerivativeFactorMatchesFiniteDifferences) {
  const double a = 0.35;
  for (const auto& w : {Profile::poly_exp({0.5, 1.0}, 1.3), Profile::x_gaussian()}) {
    auto u = WeightedFunction::lift(w, a, 1.5);
    for (double x : {0.3, 1.2, 2.7}) {
      const double h = 1e-5;
      cplx fd = (u(x + h) - u(x - h)) / (2 * h);
      EXPECT_NEAR(std::abs(u.derivative(x) - fd), 0.0, 1e-7);
    }
  }
}

TEST(HspaceLift, ZeroAndVanishingOrder) {
  SpaceGrid g{1024, 8.0};
  GridFunction zero(g, std::vector<cplx>(g.n, 0.0), Region::plus());
  EXPECT_EQ(hspace_lift(zero, 0.4).max_abs(), 0.0);

  auto w = GridFunction::sample(g, [](double x) { return std::exp(-x); }, Region::plus());
  auto u0 = hspace_lift(w, 0.0);
  for (std::size_t k = 0; k < g.n; ++k) EXPECT_EQ(u0[k], w[k]);
  // small a approaches e^+ w away from x = 0, where the lift vanishes for every a > 0
  auto us = hspace_lift(w, 1e-9);
  EXPECT_EQ(us[g.index_at_or_above(0.0)], 0.0);
  double err = 0;
  for (std::size_t k = g.index_at_or_above(0.0) + 1; k < g.n; ++k) err = std::max(err, std::abs(us[k] - w[k]));
  EXPECT_LE(err, 1e-8);
}

TEST(HspaceLift, MatchesClosedFormAndLocalExponent) {
  SpaceGrid g{4096, 8.0};
  auto w = GridFunction::sample(g, [](double x) { return std::exp(-x); }, Region::plus());
  for (double a : {0.25, 0.5, 0.75}) {
    auto u = hspace_lift(w, a);
    auto exact = WeightedFunction::lift(Profile::exponential(1.0), a, 1.0);
    double err = 0;
    for (std::size_t k = 0; k < g.n; ++k) err = std::max(err, std::abs(u[k] - exact(g.x(k))));
    EXPECT_LE(err, 1e-5) << a;
    EXPECT_EQ(support_leak(u, Region::plus()), 0.0);
    // slope of log u against log x over the first few nodes
    std::size_t k0 = g.index_at_or_above(0.0);
    double h = g.spacing();
    double slope = std::log(std::abs(u[k0 + 8] / u[k0 + 1])) / std::log(8.0);
    EXPECT_NEAR(slope, a, 0.02) << a << " h=" << h;
  }
}

TEST(WeightedTrace, Examples) {
  SpaceGrid g{4096, 4.0};
  for (double a : {0.25, 0.5, 0.75}) {
    auto u = GridFunction::sample(g, [a](double x) { return std::abs(x) < 1 ? std::pow(1 - x * x, a) : 0.0; },
                                  Region::interval(-1, 1));
    auto left = weighted_trace(u, a, -1.0, 1), right = weighted_trace(u, a, 1.0, -1);
    EXPECT_NEAR(left.value.real(), std::pow(2.0, a), 1e-6);
    EXPECT_NEAR(right.value.real(), std::pow(2.0, a), 1e-6);
    EXPECT_LT(left.extrapolation_error, 1e-6);
    // d^a (2 + d) on the half-line: trace 2, exact for the quadratic fit
    auto v = GridFunction::sample(g, [a](double x) { return x >= 0 ? std::pow(x, a) * (2 + x) : 0.0; }, Region::plus());
    auto t = weighted_trace(v, a, 0.0, 1);
    EXPECT_NEAR(t.value.real(), 2.0, 1e-10);
    EXPECT_NEAR(t.exponent, a, 0.02);
  }
}

TEST(WeightedTrace, LiftTraceMatchesBoundaryValue) {
  SpaceGrid g{4096, 8.0};
  auto w = GridFunction::sample(g, [](double x) { return std::exp(-x); }, Region::plus());
  for (double a : {0.25, 0.5, 0.75}) {
    auto t = weighted_trace(hspace_lift(w, a), a, 0.0, 1);
    EXPECT_NEAR(t.value.real(), 1 / std::tgamma(a + 1), 2e-3);
    EXPECT_NEAR(std::tgamma(a + 1) * t.value.real(), 1.0, 5e-3);
  }
}

TEST(WeightedTrace, HigherOrderVanishingGivesZeroAndWrongOrderThrows) {
  SpaceGrid g{4096, 4.0};
  const double a = 0.3;
  auto u = GridFunction::sample(g, [a](double x) { return x >= 0 ? std::pow(x, a + 1) * std::exp(-x) : 0.0; },
                                Region::plus());
  auto t = weighted_trace(u, a, 0.0, 1);
  EXPECT_NEAR(std::abs(t.value), 0.0, 1e-6);  // O(h^3) fit error
  auto bad = GridFunction::sample(g, [](double x) { return x >= 0 ? std::pow(x, 0.6) : 0.0; }, Region::plus());
  EXPECT_THROW(weighted_trace(bad, a, 0.0, 1), Error);
}

TEST(SolveInterval, ConstantDataHalfLaplacian) {
  auto P = KernelOperator::fractional_laplacian(0.5);
  auto s = solve_interval(P, [](double) { return 1.0; });
  EXPECT_LE(s.residual, 1e-6);
  EXPECT_NEAR(std::abs(s.coeffs[0] - 1.0), 0.0, 1e-6);
  double rest = 0;
  for (std::size_t k = 1; k < s.coeffs.size(); ++k) rest = std::max(rest, std::abs(s.coeffs[k]));
  EXPECT_LE(rest, 1e-6);
  EXPECT_NEAR(std::abs(s.profile.exact_trace(-1.0) - std::sqrt(2.0)), 0.0, 1e-10);
  auto l = weighted_trace(s.u, 0.5, -1.0, 1), r = weighted_trace(s.u, 0.5, 1.0, -1);
  EXPECT_NEAR(l.value.real(), std::sqrt(2.0), 1e-3);
  EXPECT_NEAR(r.value.real(), std::sqrt(2.0), 1e-3);
}

TEST(SolveInterval, GammaScaledDataGivesPowerProfile) {
  const double a = 0.3;
  auto P = KernelOperator::fractional_laplacian(a);
  auto s = solve_interval(P, [a](double) { return std::tgamma(2 * a + 1); });
  for (double x : {-0.9, -0.2, 0.5, 0.99})
    EXPECT_NEAR(std::abs(s.profile(x) - std::pow(1 - x * x, a)), 0.0, 1e-6) << x;
}

TEST(SolveInterval, ZeroDataGivesZero) {
  for (auto P : {KernelOperator::fractional_laplacian(0.4), KernelOperator::helmholtz(0.6, 1.0)}) {
    DirichletOptions opt;
    opt.degree = 30;
    auto s = solve_interval(P, [](double) { return 0.0; }, opt);
    EXPECT_LE(s.u.norm(), 1e-8) << P.name;
  }
}

TEST(SolveInterval, RecoversManufacturedPolynomial) {
  // r^+ (-Delta)^a [(1-x^2)^a q] in closed form through the Jacobi eigenvalues
  const double a = 0.65;
  std::vector<cplx> c{0.8, -0.3, 0.5, 0.0, 0.2};
  std::vector<double> lam;
  for (std::size_t k = 0; k < c.size(); ++k) lam.push_back(special::fraclap_jacobi_eigenvalue(a, int(k)));
  auto f = [&](double x) {
    std::vector<double> p;
    special::jacobi_all(int(c.size()) - 1, a, a, x, p);
    cplx s = 0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * lam[k] * p[k];
    return s;
  };
  DirichletOptions opt;
  opt.degree = 20;
  auto s = solve_interval(KernelOperator::fractional_laplacian(a), f, opt);
  auto exact = WeightedFunction::jacobi(a, c);
  for (double x : {-0.95, -0.5, 0.1, 0.7, 0.999})
    EXPECT_NEAR(std::abs(s.profile.v(x) - exact.v(x)), 0.0, 1e-5) << x;
}

TEST(SolveInterval, LinearityAndVariableCoefficient) {
  auto P = KernelOperator::variable_coefficient(0.45);
  DirichletOptions opt;
  opt.degree = 40;
  auto f1 = [](double x) { return 1.0 + x; };
  auto f2 = [](double x) { return std::cos(2 * x); };
  auto s1 = solve_interval(P, f1, opt), s2 = solve_interval(P, f2, opt);
  auto s12 = solve_interval(P, [&](double x) { return 2.0 * f1(x) - 3.0 * f2(x); }, opt);
  for (std::size_t k = 0; k < s1.coeffs.size(); ++k)
    EXPECT_NEAR(std::abs(s12.coeffs[k] - (2.0 * s1.coeffs[k] - 3.0 * s2.coeffs[k])), 0.0, 1e-9);
  EXPECT_LE(s1.residual, 1e-6);
}

TEST(SolveInterval, ResidualThresholdIsEnforced) {
  DirichletOptions opt;
  opt.degree = 2;
  opt.residual_tol = 1e-12;
  // the solution of a kinked right-hand side is not a low-degree weighted polynomial
  EXPECT_THROW(solve_interval(KernelOperator::fractional_laplacian(0.5), [](double x) { return std::abs(x); }, opt),
               Error);
}
