#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "wh/symbols.hpp"

using namespace wh;

namespace {

using Vec = std::vector<double>;

std::vector<Symbol> closed_form_catalog() {
  return {catalog::fractional_laplacian(2, 0.3), catalog::helmholtz(2, 0.5, 1.0, 3),
          catalog::variable_coefficient(2, 0.4), catalog::anisotropic(2, 0.6),
          catalog::anisotropic_x(2, 0.35), catalog::helmholtz(1, 0.75, 2.0, 3),
          catalog::fractional_laplacian(3, 0.5)};
}

}  // namespace

TEST(Excision, ProfileIsMonotoneBridge) {
  ExcisionFunction eta;
  EXPECT_EQ(eta(0.0), 0.0);
  EXPECT_EQ(eta(0.5), 0.0);
  EXPECT_EQ(eta(1.0), 1.0);
  EXPECT_EQ(eta(3.0), 1.0);
  double prev = 0;
  for (double r = 0.5; r <= 1.0; r += 0.01) {
    EXPECT_GE(eta(r), prev);
    EXPECT_LE(eta(r), 1.0);
    prev = eta(r);
  }
}

TEST(Symbol, EvalExamples) {
  auto lap = catalog::fractional_laplacian(2, 0.5);
  Vec x{0, 0};
  EXPECT_NEAR(std::abs(lap.eval(x, Vec{0, 2}, 1) - 2.0), 0.0, 1e-15);
  EXPECT_EQ(lap.eval(x, Vec{0, 0}, 1), cplx(0.0));
  auto helm = catalog::helmholtz(2, 0.5, 1.0, 3);
  EXPECT_NEAR(std::abs(helm.eval(x, Vec{3, 4}, 2) - 5.1), 0.0, 1e-14);
  EXPECT_THROW(helm.eval(x, Vec{3, 4}, 4), Error);
}

TEST(Symbol, HelmholtzExpansionApproachesExactSymbol) {
  // the truncated expansion converges to (|xi|^2+m^2)^a for |xi| > m
  auto helm = catalog::helmholtz(1, 0.3, 1.0, 8);
  Vec x{0}, xi{4.0};
  double exact = std::pow(17.0, 0.3);
  double prev = INFINITY;
  for (std::size_t J = 1; J <= 8; ++J) {
    double err = std::abs(helm.eval(x, xi, J) - exact);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-10);
}

TEST(Symbol, RejectsInconsistentDegrees) {
  auto f = [](auto, auto xi) { return squared_norm(xi); };
  EXPECT_THROW(Symbol("bad", 1, 1.0, {make_term(0, 2.0, f)}, false), Error);
}

TEST(Symbol, HomogeneityProperty) {
  std::mt19937 rng(17);
  std::normal_distribution<double> N(0, 1);
  for (const auto& sym : closed_form_catalog()) {
    for (int trial = 0; trial < 20; ++trial) {
      Vec xi(sym.dim()), x(sym.dim());
      double r = 0;
      for (auto& c : xi) c = N(rng), r += c * c;
      for (auto& c : xi) c *= (1.0 + std::abs(N(rng))) / std::sqrt(r);
      for (auto& c : x) c = N(rng);
      for (std::size_t k = 0; k < sym.term_count(); ++k) {
        cplx base = sym.eval_term(k, x, xi);
        for (double t : {1.0, 2.0, 4.0}) {
          Vec scaled(xi);
          for (auto& c : scaled) c *= t;
          cplx expect = std::pow(t, sym.term(k).degree) * base;
          EXPECT_LE(std::abs(sym.eval_term(k, x, scaled) - expect), 1e-12 * std::abs(expect)) << sym.name();
        }
      }
    }
  }
}

TEST(Symbol, JetEvaluationMatchesScalar) {
  auto sym = catalog::anisotropic_x(2, 0.35);
  std::vector<Jet> x{Jet::variable(0.3, 0, 4, 2), Jet::variable(-0.4, 1, 4, 2)};
  std::vector<Jet> xi{Jet::variable(1.2, 2, 4, 2), Jet::variable(0.7, 3, 4, 2)};
  Jet j = sym.eval_term_jet(0, x, xi);
  EXPECT_NEAR(std::abs(j.value() - sym.eval_term(0, Vec{0.3, -0.4}, Vec{1.2, 0.7})), 0.0, 1e-14);
  // d/dxi_2 by central differences
  const double h = 1e-5;
  cplx fd = (sym.eval_term(0, Vec{0.3, -0.4}, Vec{1.2, 0.7 + h}) - sym.eval_term(0, Vec{0.3, -0.4}, Vec{1.2, 0.7 - h})) /
            (2 * h);
  EXPECT_NEAR(std::abs(j.derivative({0, 0, 0, 1}) - fd), 0.0, 1e-8);
  cplx fdx = (sym.eval_term(0, Vec{0.3 + h, -0.4}, Vec{1.2, 0.7}) - sym.eval_term(0, Vec{0.3 - h, -0.4}, Vec{1.2, 0.7})) /
             (2 * h);
  EXPECT_NEAR(std::abs(j.derivative({1, 0, 0, 0}) - fdx), 0.0, 1e-8);
}

TEST(CheckEven, PassAndFailExamples) {
  auto samples = shell_samples(2, 32, {1.0, 2.0, 3.5});
  auto lap = check_even(catalog::fractional_laplacian(2, 0.4), samples, 1e-12);
  EXPECT_TRUE(lap.pass);
  EXPECT_EQ(lap.term_residual[0], 0.0);

  const double a = 0.4, eps = 0.1;
  auto odd = check_even(catalog::odd_perturbation(2, a, eps), samples, 1e-8);
  EXPECT_FALSE(odd.pass);
  EXPECT_EQ(odd.worst_term, 0);
  double r = std::hypot(odd.worst_xi[0], odd.worst_xi[1]);
  double predicted = 2 * eps * std::abs(odd.worst_xi[0]) * std::pow(r, 2 * a - 1);
  EXPECT_NEAR(odd.term_residual[0], predicted, 1e-12);
  // largest over the samples: |xi_1| = r at r = 3.5
  double bound = 0;
  for (const auto& s : samples)
    bound = std::max(bound, 2 * eps * std::abs(s[0]) * std::pow(std::hypot(s[0], s[1]), 2 * a - 1));
  EXPECT_NEAR(odd.term_residual[0], bound, 1e-12);

  auto helm = check_even(catalog::helmholtz(2, 0.5, 1.0, 3), samples, 1e-12);
  EXPECT_TRUE(helm.pass);
  EXPECT_EQ(helm.term_residual.size(), 3u);
}

TEST(CheckTransmission, EvenSymbolsPassOddFails) {
  Vec normal{0, 1};
  EXPECT_TRUE(check_transmission(catalog::fractional_laplacian(2, 0.3), 0.3, normal, 1e-6).pass);
  // order-zero even symbol with mu = 0
  EXPECT_TRUE(check_transmission(catalog::anisotropic(2, 0.0), 0.0, normal, 1e-6).pass);
  auto odd = check_transmission(catalog::odd_perturbation(2, 0.3, 0.1), 0.3, normal, 1e-6);
  EXPECT_FALSE(odd.pass);
  EXPECT_FALSE(odd.failing.empty());
}

TEST(CheckTransmission, FollowsFromEvennessOnCatalog) {
  auto samples = shell_samples(2, 24, {1.0, 2.0});
  for (const auto& sym : closed_form_catalog()) {
    if (sym.dim() != 2) continue;
    bool even = check_even(sym, samples, 1e-10).pass;
    auto tr = check_transmission(sym, sym.a(), {0, 1}, 1e-5, {0.4, -0.3});
    EXPECT_TRUE(!even || tr.pass) << sym.name() << " " << tr.residual;
    auto tr1 = check_transmission(sym, sym.a(), {1, 0}, 1e-5, {0.4, -0.3});
    EXPECT_TRUE(!even || tr1.pass) << sym.name() << " " << tr1.residual;
  }
}

TEST(CheckEllipticity, RayExamples) {
  auto sphere = sphere_samples(2, 64);
  EXPECT_TRUE(check_ellipticity_ray(catalog::fractional_laplacian(2, 0.5), pi, sphere).pass);
  auto neg = catalog::fractional_laplacian(2, 0.5).scaled(-1.0, "negated");
  EXPECT_FALSE(check_ellipticity_ray(neg, pi, sphere).pass);
  auto rot = check_ellipticity_ray(catalog::phase_rotated(2, 0.5, pi / 3), pi, sphere);
  EXPECT_TRUE(rot.pass);
  EXPECT_NEAR(rot.margin, 2 * pi / 3, 1e-12);
}

TEST(CheckEllipticity, InvariantUnderPositiveScaling) {
  auto sphere = sphere_samples(2, 48);
  std::vector<std::pair<Symbol, double>> cases{{catalog::anisotropic_x(2, 0.3), pi},
                                               {catalog::phase_rotated(2, 0.3, 2.9), pi},
                                               {catalog::variable_coefficient(2, 0.7), 0.0}};
  for (auto& [sym, theta] : cases) {
    auto base = check_ellipticity_ray(sym, theta, sphere);
    for (double s : {0.25, 3.0, 100.0}) {
      auto r = check_ellipticity_ray(sym.scaled(s, "scaled"), theta, sphere);
      EXPECT_EQ(r.pass, base.pass);
      EXPECT_EQ(r.worst_xi, base.worst_xi);
      EXPECT_EQ(r.worst_x, base.worst_x);
      EXPECT_NEAR(r.margin, base.margin, 1e-14);
    }
  }
}

TEST(BoundaryFactor, Examples) {
  EXPECT_NEAR(std::abs(boundary_factor_s0(catalog::fractional_laplacian(2, 0.3), {0.5, 0}, {0, 1}) - 1.0), 0, 1e-15);
  EXPECT_NEAR(std::abs(boundary_factor_s0(catalog::helmholtz(2, 0.3, 2.0, 3), {0, 0}, {1, 0}) - 1.0), 0, 1e-15);
  // (xi_1^4 + xi_2^4)^{a/2} 2^{a/2}: the anisotropic symbol with no cross term
  const double a = 0.45;
  auto quartic = catalog::anisotropic(2, a, 0.0);
  EXPECT_NEAR(std::abs(boundary_factor_s0(quartic, {0, 0}, {1, 0}) - std::pow(2.0, a / 2)), 0, 1e-14);
  EXPECT_THROW(boundary_factor_s0(quartic, {0, 0}, {1, 1}), Error);
}

TEST(Symbol, TableRoundTrip) {
  // sample e^{i/4} |xi|^{0.6} (1 + 0.2 cos(2t)) on 360 directions at radius 2
  std::ostringstream os;
  const double order = 0.6;
  for (int k = 0; k < 360; ++k) {
    double t = 2 * pi * k / 360 - pi;
    cplx v = std::polar(1.0, 0.25) * std::pow(2.0, order) * (1 + 0.2 * std::cos(2 * t));
    os << 2 * std::cos(t) << " " << 2 * std::sin(t) << " " << v.real() << " " << v.imag() << "\n";
  }
  std::istringstream in(os.str());
  auto sym = catalog::from_table(in, 2, order);
  Vec x{0, 0};
  for (double t : {0.1, 1.3, -2.2}) {
    cplx exact = std::polar(1.0, 0.25) * std::pow(3.0, order) * (1 + 0.2 * std::cos(2 * t));
    EXPECT_NEAR(std::abs(sym.eval(x, Vec{3 * std::cos(t), 3 * std::sin(t)}, 1) - exact), 0.0, 1e-4);
  }
  std::istringstream bad("1 0 x y\n");
  EXPECT_THROW(catalog::from_table(bad, 2, order), Error);
}
