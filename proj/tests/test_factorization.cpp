#include <gtest/gtest.h>

#include "wh/factorization.hpp"

using namespace wh;

namespace {

double max_error(const FreqSlice& f, auto&& exact) {
  double e = 0;
  for (std::size_t k = 0; k < f.size(); ++k) e = std::max(e, std::abs(f[k] - exact(f.node(k))));
  return e;
}

FreqSlice sample_zero(const FreqGrid& g, auto&& f) { return FreqSlice::sample(g, f, DecayClass::zero); }

}  // namespace

TEST(FactorizeSlice, ConstantOneIsTrivial) {
  FreqGrid g{1024, 1.0};
  auto r = factorize_slice(sample_zero(g, [](double) { return cplx(1.0); }), pi);
  EXPECT_NEAR(std::abs(r.s0 - 1.0), 0.0, 1e-15);
  EXPECT_LT((r.q_plus - 1.0).max_abs(), 1e-15);
  EXPECT_LT((r.q_minus - 1.0).max_abs(), 1e-15);
  EXPECT_LT(r.mult_residual, 1e-15);
}

TEST(FactorizeSlice, HelmholtzModelMatchesClosedForm) {
  for (double sigma : {2.0, 4.0, 8.0})
    for (double a : {0.25, 0.5, 0.75}) {
      FreqGrid g{4096, std::sqrt(sigma)};
      auto q = sample_zero(g, [&](double t) { return cplx(std::pow((sigma * sigma + t * t) / (1 + t * t), a)); });
      auto r = factorize_slice(q, pi);
      auto plus = [&](double t) { return std::pow(cplx(sigma, t) / cplx(1, t), a); };
      auto minus = [&](double t) { return std::pow(cplx(sigma, -t) / cplx(1, -t), a); };
      EXPECT_LT(max_error(r.q_plus, plus), 1e-7) << sigma << " " << a;
      EXPECT_LT(max_error(r.q_minus, minus), 1e-7);
      EXPECT_LT(r.mult_residual, 1e-8);
      EXPECT_LT(r.plus_leak, 1e-6);
      EXPECT_LT(r.minus_leak, 1e-6);
      EXPECT_NEAR(std::abs(r.s0 - 1.0), 0.0, 1e-12);
      // real even q: q- is the conjugate of q+
      EXPECT_LT((r.q_minus - r.q_plus.conjugate()).max_abs(), 1e-12);
      EXPECT_LT(r.edge_plus, 1e-3);
      EXPECT_LT(r.edge_minus, 1e-3);
    }
}

TEST(FactorizeSlice, RationalSymbolMatchesClosedForm) {
  FreqGrid g{4096, 1.5};
  auto q = sample_zero(g, [](double t) { return cplx((t * t + 1) * (t * t + 4) / std::pow(t * t + 2, 2)); });
  auto r = factorize_slice(q, pi);
  const double s2 = std::sqrt(2.0);
  EXPECT_LT(max_error(r.q_plus, [&](double t) { return cplx(1, t) * cplx(2, t) / std::pow(cplx(s2, t), 2); }), 1e-8);
  EXPECT_LT(max_error(r.q_minus, [&](double t) { return cplx(1, -t) * cplx(2, -t) / std::pow(cplx(s2, -t), 2); }),
            1e-8);
}

TEST(FactorizeSlice, ComplexValuedSymbolWithNonTrivialLimit) {
  // q = 3 e^{i/2} ((2+i t)/(1+i t))^{0.4}: plus factor only, s0 = 3 e^{i/2}
  FreqGrid g{2048, 1.0};
  const cplx s0 = std::polar(3.0, 0.5);
  auto exact_plus = [](double t) { return std::pow(cplx(2, t) / cplx(1, t), 0.4); };
  auto q = sample_zero(g, [&](double t) { return s0 * exact_plus(t); });
  auto r = factorize_slice(q, 0.5 + pi);
  EXPECT_NEAR(std::abs(r.s0 - s0), 0.0, 1e-12);
  EXPECT_LT(max_error(r.q_plus, exact_plus), 1e-9);
  EXPECT_LT((r.q_minus - 1.0).max_abs(), 1e-9);
}

TEST(FactorizeSlice, MajorizationDiagnostics) {
  FreqGrid g{4096, 2.0};
  auto q = sample_zero(g, [](double t) { return cplx(std::pow((16 + t * t) / (1 + t * t), 0.5)); });
  auto r = factorize_slice(q, pi);
  EXPECT_GT(r.psi_plus_l1, 0.0);
  EXPECT_LE(r.series_tail, 1e-12 * std::exp(r.psi_plus_l1));
  EXPECT_LE(r.f_sup, r.majorant * (1 + 1e-6));
}

TEST(FactorizeSlice, ReportsHypothesisViolations) {
  FreqGrid g{1024, 1.0};
  auto on_ray = sample_zero(g, [](double) { return cplx(-1.0); });
  try {
    factorize_slice(on_ray, pi);
    FAIL() << "expected a ray violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "ray");
  }
  auto vanishing = sample_zero(g, [](double t) { return cplx(std::pow(t * t / (1 + t * t), 4)); });
  try {
    factorize_slice(vanishing, pi);
    FAIL() << "expected a vanishing symbol";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "vanishing");
  }
  auto odd = sample_zero(g, [](double t) { return cplx(1 + 0.5 * t / std::sqrt(1 + t * t)); });
  try {
    factorize_slice(odd, pi);
    FAIL() << "expected mismatched limits";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "limits");
  }
}

TEST(FactorizePrincipal, CatalogExamples) {
  auto lap = factorize_principal(catalog::fractional_laplacian(2, 0.4), {0.0, 0.0}, {{1.0}, {3.0}});
  for (const auto& r : lap) {
    EXPECT_LT((r.q_plus - 1.0).max_abs(), 1e-14);
    EXPECT_NEAR(std::abs(r.s0 - 1.0), 0.0, 1e-15);
  }
  auto sym = catalog::anisotropic(2, 0.6);
  auto an = factorize_principal(sym, {0.0, 0.0}, {{1.0}, {2.0}, {4.0}});
  ASSERT_EQ(an.size(), 3u);
  for (const auto& r : an) {
    EXPECT_LT(r.mult_residual, 1e-7);
    EXPECT_LT(r.plus_leak, 1e-6);
    EXPECT_LT(r.minus_leak, 1e-6);
    EXPECT_NEAR(std::abs(r.s0 - sym.eval_term(0, std::vector<double>{0, 0}, std::vector<double>{0, 1})), 0.0, 1e-15);
    EXPECT_LT((r.q_minus - r.q_plus.conjugate()).max_abs(), 1e-12);
  }
  auto vc = factorize_principal(catalog::variable_coefficient(2, 0.3), {pi / 2, 0.0}, {{2.0}});
  EXPECT_NEAR(std::abs(vc[0].s0 - 1.5), 0.0, 1e-14);
  EXPECT_LT((vc[0].q_plus - 1.0).max_abs(), 1e-13);
  EXPECT_LT((vc[0].q_minus - 1.0).max_abs(), 1e-13);
  EXPECT_THROW(factorize_principal(catalog::odd_perturbation(2, 0.3, 0.1), {0, 0}, {{1.0}}), Error);
  EXPECT_THROW(factorize_principal(catalog::phase_rotated(2, 0.3, pi), {0, 0}, {{1.0}}), Error);
}

TEST(FactorizePrincipal, MultiplicativeReconstructionOnCatalog) {
  std::vector<Symbol> syms{catalog::anisotropic(2, 0.3, 3.0), catalog::anisotropic_x(2, 0.7),
                           catalog::helmholtz(2, 0.5, 1.0, 3), catalog::phase_rotated(2, 0.4, 1.0)};
  for (const auto& s : syms) {
    auto res = factorize_principal(s, {0.4, -0.9}, {{0.5}, {2.0}, {7.0}});
    for (const auto& r : res) {
      EXPECT_LT(r.mult_residual, 1e-6) << s.name();
      EXPECT_LT(r.plus_leak, 1e-6) << s.name();
      EXPECT_LT(r.minus_leak, 1e-6) << s.name();
    }
  }
}

TEST(Leibniz, OneTermCorrection) {
  // 1D, jets in (x, xi): a(xi) = 2 + 3 xi on the slice, b(x) = 1 + 5 x
  FreqGrid g{64, 1.0};
  const int nv = 2, ord = 2;
  SymbolExpansion A{JetSlice::zeros(g, nv, ord), JetSlice::zeros(g, nv, ord)}, B = A;
  for (std::size_t k = 0; k < g.n; ++k) {
    Jet xi = Jet::variable(g.node(k), 1, nv, ord), x = Jet::variable(0.2, 0, nv, ord);
    A[0].values[k] = 3.0 * xi + 2.0;
    B[0].values[k] = 5.0 * x + 1.0;
  }
  auto C = leibniz_product(A, B, 1, 1);
  for (std::size_t k = 0; k < g.n; ++k) {
    EXPECT_NEAR(std::abs(C[0].values[k].value() - (2 + 3 * g.node(k)) * 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(C[1].values[k].value() - cplx(0, -15)), 0.0, 1e-13);
  }
  // x-independent inputs: the product is pointwise
  auto D = leibniz_product(A, A, 1, 1);
  for (std::size_t k = 0; k < g.n; ++k) EXPECT_EQ(D[1].values[k].value(), cplx(0.0));
}

TEST(Leibniz, PrincipalFactorsOfXDependentSymbolLeaveOrderMinusOne) {
  SliceContext ctx{catalog::anisotropic_x(2, 0.5), {0.3, -0.2}, {1.5}, 2048, 2};
  auto fe = factor_expansion(ctx, 0);
  SymbolExpansion m0{fe.m[0], fe.m[0] * 0.0}, p0{fe.q_plus[0], fe.q_plus[0] * 0.0};
  auto C = leibniz_product(m0, p0, 1, 2);
  double diff0 = 0, c1 = 0;
  for (std::size_t k = 0; k < C[0].size(); ++k) {
    diff0 = std::max(diff0, std::abs(C[0].values[k].value() - fe.q[0].values[k].value()));
    c1 = std::max(c1, std::abs(C[1].values[k].value()));
  }
  EXPECT_LT(diff0, 1e-12);
  EXPECT_GT(c1, 1e-4);  // the x-dependence leaves a genuine order -1 difference
  // it decays in xi_n: H_{-1} class
  auto last = C[1].value_slice(DecayClass::minus1);
  EXPECT_LT(std::abs(last[0]) + std::abs(last[last.size() - 1]), 1e-3 * c1);
}

TEST(LowerOrder, NoLowerTermsGiveZero) {
  SliceContext ctx{catalog::anisotropic(2, 0.5), {0, 0}, {2.0}, 1024, 2};
  auto fe = factor_expansion(ctx, 2);
  for (int k = 1; k <= 2; ++k) {
    EXPECT_LT(fe.q_plus[k].max_abs(), 1e-14);
    EXPECT_LT(fe.m[k].max_abs(), 1e-14);
  }
}

TEST(LowerOrder, HelmholtzRecursionMatchesClosedFactor) {
  const double a = 0.5, m = 1.0;
  for (double xp : {2.0, 4.0}) {
    SliceContext ctx{catalog::helmholtz(2, a, m, 3), {0, 0}, {xp}, 4096, 2};
    auto fe = factor_expansion(ctx, 2);
    EXPECT_LT(fe.q_plus[1].max_abs(), 1e-14);
    // m^2 term of ((sigma_m + i t)/(|xi'| + i t))^a
    double e = 0;
    for (std::size_t k = 0; k < fe.q_plus[2].size(); ++k) {
      double t = fe.q_plus[2].grid.node(k);
      cplx exact = a * m * m / (2 * xp * cplx(xp, t));
      e = std::max(e, std::abs(fe.q_plus[2].values[k].value() - exact));
    }
    EXPECT_LT(e, 1e-6);
    // q_2^- is its conjugate
    for (std::size_t k = 0; k < fe.q_minus[2].size(); k += 97)
      EXPECT_NEAR(std::abs(fe.q_minus[2].values[k].value() - std::conj(fe.q_plus[2].values[k].value())), 0.0, 1e-12);
  }
}

TEST(LowerOrder, VariableCoefficientUsesQuotientOnly) {
  // c(x)|xi|^{2a} has q_0^+ = q_0^- = 1, so q_1 = 0 gives vanishing lower terms
  SliceContext ctx{catalog::variable_coefficient(2, 0.3), {0.7, 0.2}, {1.0}, 1024, 2};
  auto fe = factor_expansion(ctx, 1);
  EXPECT_LT(fe.q_plus[1].max_abs(), 1e-14);
  EXPECT_LT(fe.m[1].max_abs(), 1e-14);
  EXPECT_NEAR(std::abs(fe.s0.value() - (1 + 0.5 * std::sin(0.7))), 0.0, 1e-14);
}

TEST(Parametrix, XIndependentIsExactReciprocal) {
  SliceContext ctx{catalog::anisotropic(2, 0.6), {0, 0}, {2.0}, 2048, 2};
  auto fe = factor_expansion(ctx, 2);
  auto qt = parametrix_plus(fe.q_plus, 2, 2);
  auto check = check_parametrix(fe.q_plus, qt, 2, 2);
  EXPECT_LT(check.worst(), 1e-12);
  for (std::size_t k = 0; k < qt[0].size(); k += 101)
    EXPECT_NEAR(std::abs(qt[0].values[k].value() * fe.q_plus[0].values[k].value() - 1.0), 0.0, 1e-14);
}

TEST(Parametrix, XDependentCompositeResidual) {
  for (double xp : {1.0, 3.0}) {
    SliceContext ctx{catalog::anisotropic_x(2, 0.5), {0.3, -0.2}, {xp}, 2048, 2};
    auto fe = factor_expansion(ctx, 2);
    auto qt = parametrix_plus(fe.q_plus, 2, 2);
    auto check = check_parametrix(fe.q_plus, qt, 2, 2);
    EXPECT_LT(check.worst(), 1e-5) << xp;
    // the correction terms are genuinely nonzero
    EXPECT_GT(qt[1].max_abs(), 1e-6);
  }
}

TEST(FactorizationResidual, HelmholtzDecayRates) {
  auto sym = catalog::helmholtz(2, 0.5, 1.0, 3);
  auto k0 = factorization_residual(sym, {0, 0}, {{2.0}, {4.0}, {8.0}}, 0);
  auto k1 = factorization_residual(sym, {0, 0}, {{2.0}, {4.0}, {8.0}}, 1);
  EXPECT_LE(k0.exponent, -0.8);
  EXPECT_LE(k1.exponent, -1.8);
  EXPECT_FALSE(k0.at_floor);
}

TEST(FactorizationResidual, AnisotropicDecayRates) {
  auto flat = factorization_residual(catalog::anisotropic(2, 0.5), {0, 0}, {{2.0}, {4.0}, {8.0}}, 0);
  EXPECT_TRUE(flat.at_floor);
  auto sym = catalog::anisotropic_x(2, 0.5);
  auto k0 = factorization_residual(sym, {0.3, -0.2}, {{2.0}, {4.0}, {8.0}}, 0);
  auto k1 = factorization_residual(sym, {0.3, -0.2}, {{2.0}, {4.0}, {8.0}}, 1);
  EXPECT_LE(k0.exponent, -0.8);
  EXPECT_LE(k1.exponent, -1.8);
}

TEST(FactorizationResidual, IdentityFactorizationIsZero) {
  auto r = factorization_residual(catalog::fractional_laplacian(2, 0.3), {0, 0}, {{2.0}, {4.0}}, 1);
  for (double v : r.residual) EXPECT_LT(v, 1e-14);
}
