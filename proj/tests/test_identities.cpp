#include <gtest/gtest.h>

#include <random>

#include "wh/factorization.hpp"
#include "wh/identities.hpp"

using namespace wh;

namespace {

WeightedFunction power_profile(double a) {
  return WeightedFunction::interval(a, [](double) { return cplx(1.0); }, [](double) { return cplx(0.0); });
}
WeightedFunction x_power_profile(double a) {
  return WeightedFunction::interval(a, [](double x) { return cplx(x); }, [](double) { return cplx(1.0); });
}
WeightedFunction zero_profile(double a) {
  return WeightedFunction::interval(a, [](double) { return cplx(0.0); }, [](double) { return cplx(0.0); });
}

IdentityOptions exact_traces() {
  IdentityOptions o;
  o.traces = TraceMode::exact;
  return o;
}

}  // namespace

TEST(IdentityReport, BookkeepingIsExact) {
  auto r = verify_ibp_halfline(Profile::poly_exp({1.0, 0.4}, 1.2), Profile::exponential(0.8), 0.4);
  cplx lhs = 0, rhs = 0;
  for (const auto& t : r.lhs_terms) lhs += t.value;
  for (const auto& t : r.rhs_terms) rhs += t.value;
  EXPECT_EQ(lhs, r.lhs);
  EXPECT_EQ(rhs, r.rhs);
  EXPECT_EQ(r.abs_residual, std::abs(lhs - rhs));
  EXPECT_THROW(r.term("missing"), Error);
}

TEST(GreenClassical, Examples) {
  auto e = Profile::exponential(1.0);
  auto r = verify_green_classical(e, e);
  EXPECT_NEAR(std::abs(r.lhs - cplx(-1.0)), 0.0, 1e-10);
  EXPECT_LE(r.abs_residual, 1e-10);
  auto z = verify_green_classical(e, Profile::poly_exp({0.0, 1.0}, 1.0));
  EXPECT_NEAR(std::abs(z.rhs), 0.0, 1e-15);
  EXPECT_LE(z.abs_residual, 1e-10);
  EXPECT_LE(verify_green_classical(Profile::gaussian(), Profile::exponential(2.0)).abs_residual, 1e-10);
}

TEST(IbpHalfline, ExponentialPairGivesHalf) {
  auto e = Profile::exponential(1.0);
  auto r = verify_ibp_halfline(e, e, 0.3);
  EXPECT_NEAR(std::abs(r.rhs - 0.5), 0.0, 1e-12);
  EXPECT_LE(r.rel_residual, 1e-4);
  EXPECT_NEAR(std::abs(r.lhs - 0.5), 0.0, 1e-4);
}

TEST(IbpHalfline, RandomPairsAndVanishingBoundaryValue) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> C(-1.0, 1.0), B(0.7, 2.0);
  for (double a : {0.25, 0.5, 0.75}) {
    for (int trial = 0; trial < 4; ++trial) {
      auto w = Profile::poly_exp({cplx(C(rng), C(rng)), C(rng), C(rng)}, B(rng));
      auto wp = Profile::poly_exp({C(rng), cplx(C(rng), C(rng))}, B(rng));
      EXPECT_LE(verify_ibp_halfline(w, wp, a).rel_residual, 1e-4) << a;
    }
    auto r = verify_ibp_halfline(Profile::x_gaussian(), Profile::exponential(1.0), a);
    EXPECT_EQ(r.term("boundary"), cplx(0.0));
    EXPECT_LE(r.abs_residual, 1e-8);
  }
}

TEST(IbpHalfline, SmallOrderApproachesGreenFormula) {
  // as a -> 0 the lifted derivative concentrates w'(0) at the boundary
  auto w = Profile::poly_exp({1.0, 0.5}, 1.5), wp = Profile::exponential(1.0);
  auto r = verify_ibp_halfline(w, wp, 1e-7);
  EXPECT_LE(r.abs_residual, 1e-8);
  auto g = verify_green_classical(w, wp);
  EXPECT_NEAR(std::abs(r.rhs - (-g.term("int dv conj(w)"))), 0.0, 1e-8);
}

TEST(IbpHelmholtz, ExponentialPairAndExactTraces) {
  auto e = Profile::exponential(1.0);
  auto r = verify_ibp_helmholtz(e, e, 0.5, 1.0);
  EXPECT_NEAR(std::abs(r.rhs - 1.0), 0.0, 5e-3);
  EXPECT_LE(r.rel_residual, 5e-3);
  // with exact traces only quadrature error remains
  auto x = verify_ibp_helmholtz(e, e, 0.5, 1.0, exact_traces());
  EXPECT_NEAR(std::abs(x.rhs - 1.0), 0.0, 1e-12);
  EXPECT_LE(x.rel_residual, 1e-6);
}

TEST(IbpHelmholtz, VanishingBoundaryValueAndMass) {
  auto w = Profile::poly_exp({0.0, 1.0}, 1.0), wp = Profile::poly_exp({1.0, -0.5}, 1.5);
  auto r = verify_ibp_helmholtz(w, wp, 0.4, 2.0);
  EXPECT_LE(std::abs(r.term("boundary")), 1e-5);
  EXPECT_LE(r.abs_residual, 1e-5);
}

TEST(IbpHelmholtz, RefinementHalvesResidual) {
  auto w = Profile::poly_exp({1.0, 0.3}, 1.2), wp = Profile::exponential(1.0);
  IdentityOptions coarse;
  coarse.grid = {1024, 4.0};
  IdentityOptions fine = coarse;
  fine.grid = {2048, 4.0};
  auto a = verify_ibp_helmholtz(w, wp, 0.6, 1.0, coarse), b = verify_ibp_helmholtz(w, wp, 0.6, 1.0, fine);
  // lhs does not depend on the grid
  EXPECT_EQ(a.lhs, b.lhs);
  EXPECT_LE(b.rel_residual, 0.5 * a.rel_residual);
  auto c = retrace_halfline(a, KernelOperator::helmholtz(0.6, 1.0), 1.0, w, wp, fine);
  EXPECT_EQ(c.rhs, b.rhs);
  EXPECT_EQ(c.abs_residual, b.abs_residual);
}

TEST(IbpFraclap, ClosesWithExtrapolatedTraces) {
  auto w = Profile::exponential(1.0), wp = Profile::poly_exp({1.0, 1.0}, 1.5);
  auto r = verify_ibp_fraclap(w, wp, 0.3);
  EXPECT_LE(r.rel_residual, 5e-3);
  EXPECT_LE(verify_ibp_fraclap(w, wp, 0.3, exact_traces()).rel_residual, 1e-6);
}

TEST(IbpGeneral, VariableCoefficientNeedsCommutator) {
  auto P = KernelOperator::variable_coefficient(0.4);
  auto w = Profile::poly_exp({1.0, -0.5}, 1.0), wp = Profile::exponential(1.3);
  auto r = verify_ibp_general(P, w, wp, exact_traces());
  EXPECT_GT(std::abs(r.term("commutator")), 1e-2);
  EXPECT_LE(r.rel_residual, 1e-6);
  EXPECT_LE(verify_ibp_general(P, w, wp).rel_residual, 5e-3);
}

TEST(MinusFactor, BalancesWithCommutator) {
  auto w = Profile::poly_exp({1.0, 0.5}, 1.0), w0 = Profile::poly_exp({0.5, -1.0}, 1.4);
  auto r = verify_minus_factor(w, w0, 0.35);
  EXPECT_GT(std::abs(r.term("commutator")), 1e-2);
  EXPECT_LE(r.rel_residual, 1e-6);
  // c = 1 reduces to the plain half-line formula
  auto one = Profile::smooth([](double) { return cplx(1.0); }, [](double) { return cplx(0.0); },
                             [](double) { return cplx(0.0); }, 0.0);
  auto plain = verify_minus_factor(w, w0, 0.35, one);
  auto ref = verify_ibp_halfline(w, w0, 0.35);
  EXPECT_NEAR(std::abs(plain.lhs - ref.lhs), 0.0, 1e-10);
  EXPECT_EQ(plain.term("commutator"), cplx(0.0));
}

TEST(Pairing, Examples) {
  auto P = KernelOperator::fractional_laplacian(0.5);
  auto u = power_profile(0.5);
  EXPECT_LE(verify_pairing(P, u, u).rel_residual, 1e-8);
  auto H = KernelOperator::helmholtz(0.3, 1.0);
  auto v = WeightedFunction::jacobi(0.3, {1.0, 0.5, -0.2}), vp = WeightedFunction::jacobi(0.3, {0.2, cplx(0, 1), 0.3});
  EXPECT_LE(verify_pairing(H, v, vp).rel_residual, 1e-5);
  auto R = KernelOperator::phase_rotated(0.3, pi / 6);
  auto r = verify_pairing(R, v, vp);
  EXPECT_LE(r.rel_residual, 1e-5);
  auto V = KernelOperator::variable_coefficient(0.3);
  EXPECT_LE(verify_pairing(V, v, vp).rel_residual, 1e-5);
}

TEST(IbpDomain, Examples) {
  auto P = KernelOperator::fractional_laplacian(0.5);
  auto u = power_profile(0.5);
  auto r = verify_ibp_domain(P, u, u);
  EXPECT_NEAR(std::abs(r.lhs), 0.0, 1e-6);
  EXPECT_LE(r.abs_residual, 1e-6);

  const double a = 0.35;
  auto Q = KernelOperator::fractional_laplacian(a);
  auto s = verify_ibp_domain(Q, power_profile(a), x_power_profile(a));
  EXPECT_LE(s.rel_residual, 1e-3);
  EXPECT_LE(std::abs(s.term("commutator")), 1e-12);

  auto C = KernelOperator::variable_coefficient(a);
  auto v = WeightedFunction::jacobi(a, {1.0, 0.3, 0.1}), vp = WeightedFunction::jacobi(a, {0.5, -0.2});
  auto t = verify_ibp_domain(C, v, vp);
  EXPECT_GT(std::abs(t.term("commutator")), 1e-2);
  EXPECT_LE(t.rel_residual, 5e-3);
  EXPECT_LE(verify_ibp_domain(C, v, vp, exact_traces()).rel_residual, 1e-6);
}

TEST(IbpDomain, ConjugationSymmetry) {
  // swapping the pair conjugates both sides for a self-adjoint operator
  auto H = KernelOperator::helmholtz(0.45, 1.0);
  auto u = WeightedFunction::jacobi(0.45, {1.0, cplx(0.2, 0.3)}), up = WeightedFunction::jacobi(0.45, {0.4, 0.0, 0.7});
  auto r1 = verify_ibp_domain(H, u, up, exact_traces()), r2 = verify_ibp_domain(H, up, u, exact_traces());
  EXPECT_NEAR(std::abs(r1.lhs - std::conj(r2.lhs)), 0.0, 1e-8 * std::abs(r1.lhs));
  EXPECT_NEAR(std::abs(r1.rhs - std::conj(r2.rhs)), 0.0, 1e-12 * std::abs(r1.rhs));
  EXPECT_NEAR(std::abs(r1.term("int Pu conj(du')") - std::conj(r2.term("int du conj(P*u')"))), 0.0, 1e-8);
}

TEST(IbpDomain, RefinementHalvesResidual) {
  auto C = KernelOperator::variable_coefficient(0.3);
  auto u = WeightedFunction::jacobi(0.3, {1.0, 0.5, 0.2}), up = WeightedFunction::jacobi(0.3, {0.7, -0.4, 0.1});
  IdentityOptions coarse;
  coarse.grid = {256, 2.0};
  IdentityOptions fine = coarse;
  fine.grid = {512, 2.0};
  auto a = verify_ibp_domain(C, u, up, coarse), b = verify_ibp_domain(C, u, up, fine);
  EXPECT_LE(b.rel_residual, 0.5 * a.rel_residual);
}

TEST(Radial, FractionalLaplacianClosedForm) {
  const double a = 0.3;
  auto P = KernelOperator::fractional_laplacian(a);
  auto u = power_profile(a);
  auto rep = verify_radial(P, u, u);
  // lhs = -2 Gamma(2a+1) int (1-x^2)^a
  double B = std::sqrt(pi) * std::tgamma(a + 1) / std::tgamma(a + 1.5);
  EXPECT_NEAR(std::abs(rep.general.lhs + 2 * std::tgamma(2 * a + 1) * B), 0.0, 1e-5);
  EXPECT_LE(rep.general.rel_residual, 1e-5);
  EXPECT_LE(rep.homogeneous.rel_residual, 1e-5);
  EXPECT_TRUE(rep.homogeneous_symbol);
  EXPECT_LE(rep.homogeneity_defect, 1e-8);
}

TEST(Radial, HelmholtzIsFlaggedNonHomogeneous) {
  auto H = KernelOperator::helmholtz(0.4, 1.0);
  auto u = WeightedFunction::jacobi(0.4, {1.0, 0.2}), up = WeightedFunction::jacobi(0.4, {0.5, 0.0, 0.3});
  auto rep = verify_radial(H, u, up);
  EXPECT_LE(std::abs(rep.p2_term), 1e-12);
  EXPECT_FALSE(rep.homogeneous_symbol);
  EXPECT_GT(rep.homogeneity_defect, 1e-2);
  EXPECT_LE(rep.general.rel_residual, 5e-3);
  EXPECT_GT(rep.homogeneous.rel_residual, 1e-2);
}

TEST(Radial, ZeroTestFunctionGivesZero) {
  auto P = KernelOperator::fractional_laplacian(0.6);
  auto rep = verify_radial(P, power_profile(0.6), zero_profile(0.6));
  EXPECT_EQ(rep.general.lhs, cplx(0.0));
  EXPECT_EQ(rep.general.rhs, cplx(0.0));
}

TEST(Radial, VariableCoefficientHasBothCommutatorParts) {
  auto C = KernelOperator::variable_coefficient(0.35);
  auto u = WeightedFunction::jacobi(0.35, {1.0, 0.3}), up = WeightedFunction::jacobi(0.35, {0.6, 0.0, -0.2});
  auto rep = verify_radial(C, u, up, exact_traces());
  EXPECT_GT(std::abs(rep.p2_term), 1e-2);
  EXPECT_LE(rep.general.rel_residual, 1e-6);
}

TEST(Pohozaev, HalfLaplacianConstantData) {
  auto P = KernelOperator::fractional_laplacian(0.5);
  auto rep = verify_pohozaev(P, Nonlinearity::constant(1.0), power_profile(0.5));
  EXPECT_LE(rep.equation_residual, 1e-6);
  EXPECT_NEAR(rep.homogeneous.lhs.real(), -pi, 1e-6);
  EXPECT_NEAR(rep.homogeneous.rhs.real(), -pi, 1e-6);
  EXPECT_LE(rep.general.abs_residual, 1e-6);
}

TEST(Pohozaev, PowerProfileAndZero) {
  const double a = 0.3;
  auto P = KernelOperator::fractional_laplacian(a);
  auto rep = verify_pohozaev(P, Nonlinearity::constant(std::tgamma(2 * a + 1)), power_profile(a));
  EXPECT_LE(rep.equation_residual, 1e-6);
  EXPECT_LE(rep.homogeneous.abs_residual, 1e-5);
  EXPECT_LE(rep.general.abs_residual, 1e-5);
  auto z = verify_pohozaev(P, Nonlinearity::power(3.0), zero_profile(a));
  EXPECT_EQ(z.general.lhs, cplx(0.0));
  EXPECT_EQ(z.general.rhs, cplx(0.0));
}

TEST(Pohozaev, HelmholtzSolutionFromSolver) {
  // u solves (-Delta+m^2)^a u = 1 on the interval; the general form needs P1 = 2aP - P3
  const double a = 0.4;
  auto H = KernelOperator::helmholtz(a, 1.0);
  DirichletOptions dopt;
  dopt.degree = 30;
  auto sol = solve_interval(H, [](double) { return 1.0; }, dopt);
  auto rep = verify_pohozaev(H, Nonlinearity::constant(1.0), sol.profile, exact_traces());
  EXPECT_LE(rep.equation_residual, 1e-6);
  EXPECT_LE(rep.general.rel_residual, 1e-6);
  EXPECT_GT(rep.homogeneous.rel_residual, 1e-3);
}

TEST(Pohozaev, DuplicationFormulaBalance) {
  // (2a+1) Gamma(2a+1) B(a) = 2 Gamma(a+1)^2 4^a, the closed-form content of the power-profile case
  for (double a : {0.1, 0.3, 0.5, 0.77, 0.95}) {
    double B = std::sqrt(pi) * std::tgamma(a + 1) / std::tgamma(a + 1.5);
    double lhs = (2 * a + 1) * std::tgamma(2 * a + 1) * B;
    double rhs = 2 * std::pow(std::tgamma(a + 1), 2) * std::pow(4.0, a);
    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  }
}

TEST(Positivity, RadialFormsArePositive) {
  std::mt19937 rng(5);
  std::normal_distribution<double> N(0, 1);
  const double a = 0.3, m = 1.0;
  FrequencyForm form(a, 6);
  std::vector<std::vector<double>> samples;
  for (int s = 0; s < 12; ++s) {
    std::vector<double> c(7);
    for (auto& x : c) x = N(rng);
    samples.push_back(c);
  }
  auto p1 = positivity_analysis(form, [&](double xi) { return helmholtz_p1_symbol(a, m, xi); }, samples);
  auto p3 = positivity_analysis(form, [&](double xi) { return helmholtz_p3_symbol(a, m, xi); }, samples);
  EXPECT_TRUE(p1.pass) << p1.min_ratio;
  EXPECT_TRUE(p3.pass) << p3.min_ratio;
  EXPECT_THROW(positivity_analysis(form, [](double) { return 1.0; }, {{0.0, 0.0}}), Error);
}

TEST(Positivity, FrequencyFormMatchesSpatialPairing) {
  // the multiplier side against the kernel side for P3 and for the full operator
  const double a = 0.35, m = 1.5;
  std::vector<double> c{1.0, 0.4, -0.3};
  FrequencyForm form(a, 2, 4000.0);
  auto u = WeightedFunction::jacobi(a, {1.0, 0.4, -0.3});
  auto nodes = detail::interval_nodes(a, 40);
  auto sup = KernelSupport::interval();
  auto P3 = KernelOperator::helmholtz_p3(a, m);
  cplx spatial = detail::integrate(nodes, [&](double x) { return P3.apply(u, x, sup) * std::conj(u.v(x)); }, 0);
  double freq = form([&](double xi) { return helmholtz_p3_symbol(a, m, xi); }, c);
  EXPECT_NEAR(spatial.real(), freq, 1e-6 * std::abs(freq));
  auto L = KernelOperator::fractional_laplacian(a);
  cplx sl = detail::integrate(nodes, [&](double x) { return L.apply(u, x, sup) * std::conj(u.v(x)); }, 0);
  double fl = form([&](double xi) { return std::pow(xi, 2 * a); }, c);
  // the dropped tail decays like cutoff^{-1}
  EXPECT_NEAR(sl.real(), fl, 2e-3 * std::abs(sl));
  EXPECT_LE(fl, sl.real());
}

TEST(SignChain, CriticalExponentAndContradiction) {
  EXPECT_EQ(critical_exponent(1, 0.25), 3.0);
  EXPECT_THROW(critical_exponent(1, 0.5), Error);
  auto s = nonexistence_sign_chain(0.25, 1.0, 3.0, {1.0, 0.0, 0.3});
  EXPECT_EQ(s.coefficient, 0.0);
  EXPECT_TRUE(s.p3_positive);
  EXPECT_LT(s.boundary_term, 0.0);
  EXPECT_TRUE(s.contradiction);
  // below the critical exponent the power coefficient is negative and the chain is silent
  auto sub = nonexistence_sign_chain(0.25, 1.0, 2.0, {1.0, 0.0, 0.3});
  EXPECT_LT(sub.coefficient, 0.0);
  EXPECT_FALSE(sub.contradiction);
}

TEST(TraceInvisibility, PlusFactorKeepsWeightedTrace) {
  // q+ = ((2 + i xi) / (1 + i xi))^{0.4} tends to 1, so Op(q+ - 1) does not see the weighted trace
  FreqGrid fg{2048, 2.0};
  auto q = FreqSlice::sample(fg, [](double t) { return cplx(std::pow((4 + t * t) / (1 + t * t), 0.4)); }, DecayClass::zero);
  auto fac = factorize_slice(q, pi);
  auto P = DiscreteOp::plus_factor(fac.q_plus);
  SpaceGrid g{8192, 32.0};
  for (double a : {0.25, 0.5, 0.75}) {
    auto lifted = WeightedFunction::lift(Profile::exponential(1.0), a, 1.0);
    auto v = GridFunction::sample(g, [&](double x) { return lifted(x); }, Region::plus());
    auto diff = P(v) - v;
    auto t = weighted_trace(diff.restricted(Region::plus()), a, 0.0, 1);
    EXPECT_LE(std::abs(t.value), 2e-3 * v.norm()) << a;
    EXPECT_NEAR(std::abs(weighted_trace(v, a, 0.0, 1).value), 1 / std::tgamma(a + 1), 1e-3);
  }
}
