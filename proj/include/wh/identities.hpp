#pragma once

// Integration-by-parts, radial and Pohozaev identities for order-2a operators, evaluated
// term by term, plus the positivity and sign arguments that accompany them.

#include "dirichlet.hpp"

namespace wh {

struct IdentityTerm {
  std::string name;
  cplx value;
};

/// Both sides of an identity as named terms; lhs and rhs are the plain sums of their terms.
struct IdentityReport {
  std::string id;
  std::vector<IdentityTerm> lhs_terms, rhs_terms;
  cplx lhs = 0.0, rhs = 0.0;
  double abs_residual = 0.0, rel_residual = 0.0;
  std::vector<std::pair<std::string, double>> diagnostics;

  IdentityReport& close() {
    lhs = rhs = 0.0;
    for (const auto& t : lhs_terms) lhs += t.value;
    for (const auto& t : rhs_terms) rhs += t.value;
    abs_residual = std::abs(lhs - rhs);
    double scale = std::max(std::abs(lhs), std::abs(rhs));
    rel_residual = scale > 0 ? abs_residual / scale : 0.0;
    return *this;
  }
  cplx term(const std::string& name) const {
    for (const auto* side : {&lhs_terms, &rhs_terms})
      for (const auto& t : *side)
        if (t.name == name) return t.value;
    throw Error("identity", "no term named " + name + " in " + id);
  }
  double diagnostic(const std::string& name) const {
    for (const auto& [k, v] : diagnostics)
      if (k == name) return v;
    throw Error("identity", "no diagnostic named " + name + " in " + id);
  }
  bool within(double rel_tol, double abs_tol = 0.0) const { return rel_residual <= rel_tol || abs_residual <= abs_tol; }
};

enum class TraceMode { extrapolated, exact };

struct IdentityOptions {
  SpaceGrid grid{4096, 4.0};  // grid used by the extrapolated traces
  TraceMode traces = TraceMode::extrapolated;
  int nodes = 32;             // Gauss nodes per panel of the outer integrals
  int threads = 0;
};

/// Right-hand sides f(u) for the semilinear problem r^+ P u = f(u), with primitives F(0) = 0.
struct Nonlinearity {
  enum class Kind { constant, power, linear };
  Kind kind = Kind::constant;
  double value = 1.0;     // constant c, or lambda for the linear case
  double exponent = 1.0;  // r in sign |t|^{r-1} t
  double sign = 1.0;

  static Nonlinearity constant(double c) { return {Kind::constant, c, 1.0, 1.0}; }
  static Nonlinearity power(double r, double sign = 1.0) {
    require(r > 0, "nonlinearity", "power exponent must be positive");
    return {Kind::power, 1.0, r, sign};
  }
  static Nonlinearity linear(double lambda) { return {Kind::linear, lambda, 1.0, 1.0}; }

  double f(double t) const {
    switch (kind) {
      case Kind::constant: return value;
      case Kind::linear: return value * t;
      case Kind::power: return sign * std::pow(std::abs(t), exponent - 1) * t;
    }
    return 0;
  }
  double F(double t) const {
    switch (kind) {
      case Kind::constant: return value * t;
      case Kind::linear: return 0.5 * value * t * t;
      case Kind::power: return sign * std::pow(std::abs(t), exponent + 1) / (exponent + 1);
    }
    return 0;
  }
};

namespace detail {

struct NodeSet {
  std::vector<double> x, w;
};

/// Nodes for int_0^reach F(x) x^alpha dx: Gauss-Jacobi on [0, 1/2], Gauss-Legendre on doubling panels.
inline NodeSet halfline_nodes(double alpha, double reach, int nodes) {
  NodeSet s;
  const double p = std::min(0.5, reach);
  const auto& gj = quad::cached_gauss_jacobi(nodes, 0.0, alpha);
  const double scale = std::pow(0.5 * p, alpha) * 0.5 * p;
  for (std::size_t k = 0; k < gj.size(); ++k) s.x.push_back(0.5 * p * (1 + gj.nodes[k])), s.w.push_back(gj.weights[k] * scale);
  const auto& gl = quad::gauss_legendre(nodes);
  for (double lo = p; lo < reach * (1 - 1e-15);) {
    double hi = std::min(reach, 2 * lo);
    for (std::size_t k = 0; k < gl.size(); ++k) {
      double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[k];
      s.x.push_back(x), s.w.push_back(0.5 * (hi - lo) * gl.weights[k] * std::pow(x, alpha));
    }
    lo = hi;
  }
  return s;
}

/// Nodes for int_{-1}^1 F(x) (1-x^2)^alpha dx.
inline NodeSet interval_nodes(double alpha, int nodes) {
  const auto& gj = quad::cached_gauss_jacobi(nodes, alpha, alpha);
  return {gj.nodes, gj.weights};
}


/// sum_k w_k f(x_k) with f evaluated in parallel and summed in a fixed order.
template <class F>
cplx integrate(const NodeSet& s, F&& f, int threads) {
  std::vector<cplx> vals(s.x.size());
  parallel_for(s.x.size(), default_threads(threads), [&](std::size_t k) { vals[k] = cplx(f(s.x[k])); });
  cplx sum = 0;
  for (std::size_t k = 0; k < vals.size(); ++k) sum += s.w[k] * vals[k];
  return sum;
}

inline cplx principal_at(const KernelOperator& P, double b, double normal) {
  return boundary_factor_s0(P.symbol(), {b}, {normal});
}

/// r^+ Xi_{sigma,-}^a e^+ w at x > 0: (1/Gamma(1-a)) int_0^inf s^{-a} e^{-sigma s} (sigma w - w')(x+s) ds.
inline cplx minus_order_reduce(const Profile& w, double a, double sigma, double x) {
  const double reach = 45.0 / std::min(sigma, w.decay > 0 ? w.decay : 1.0);
  return quad::power_weighted(-a, reach, [&](double s) { return std::exp(-sigma * s) * (sigma * w(x + s) - w.df(x + s)); },
                              0.5, 32) /
         std::tgamma(1 - a);
}

}  // namespace detail

/// gamma_0(x^{-a} Xi_{sigma,+}^{-a} e^+ w), either exact or extrapolated from the grid lift.
inline TraceValue lifted_trace(const Profile& w, double a, double sigma, const IdentityOptions& opt) {
  if (opt.traces == TraceMode::exact) return {w(0.0) / std::tgamma(a + 1), 0.0, 0.0, a};
  auto samples = GridFunction::sample(opt.grid, [&](double x) { return x >= 0 ? w(x) : cplx(0.0); }, Region::plus());
  return weighted_trace(hspace_lift(samples, a, sigma), a, 0.0, 1);
}

/// gamma_0(d^{-a} u) at a boundary point of the domain of u.
inline TraceValue domain_trace(const WeightedFunction& u, double b, const IdentityOptions& opt) {
  if (opt.traces == TraceMode::exact) return {u.exact_trace(b), b, 0.0, u.a};
  return weighted_trace(u.sample(opt.grid), u.a, b, int(u.domain.interior_normal(b)));
}

// ---------------------------------------------------------------------------
// Half-line identities

/// int_0^inf (v' conj(w) + v conj(w')) = -v(0) conj(w(0)).
inline IdentityReport verify_green_classical(const Profile& v, const Profile& w, const IdentityOptions& opt = {}) {
  const double reach = 45.0 / std::min(v.decay, w.decay);
  auto nodes = detail::halfline_nodes(0.0, reach, opt.nodes);
  IdentityReport r;
  r.id = "green_classical";
  r.lhs_terms = {{"int dv conj(w)", detail::integrate(nodes, [&](double x) { return v.df(x) * std::conj(w(x)); }, 1)},
                 {"int v conj(dw)", detail::integrate(nodes, [&](double x) { return v(x) * std::conj(w.df(x)); }, 1)}};
  r.rhs_terms = {{"boundary", -v(0.0) * std::conj(w(0.0))}};
  return r.close();
}

/// int_0^inf Xi_-^a e^+ w conj(d u') = gamma_0 w conj(gamma_0 w') + int_0^inf w conj(d w'),
/// with u' = Xi_+^{-a} e^+ w' and Xi_pm = 1 -+ i xi.
inline IdentityReport verify_ibp_halfline(const Profile& w, const Profile& wp, double a, const IdentityOptions& opt = {}) {
  require(a > 0 && a < 1, "identity", "a must lie in (0, 1)");
  auto up = WeightedFunction::lift(wp, a, 1.0);
  auto nodes = detail::halfline_nodes(a - 1, up.reach, opt.nodes);
  auto plain = detail::halfline_nodes(0.0, up.reach, opt.nodes);
  IdentityReport r;
  r.id = "ibp_halfline";
  r.lhs_terms = {{"int Xi_minus^a e+w conj(du')",
                  detail::integrate(nodes, [&](double x) { return detail::minus_order_reduce(w, a, 1.0, x) * std::conj(up.g(x)); },
                                    opt.threads)}};
  r.rhs_terms = {{"boundary", w(0.0) * std::conj(wp(0.0))},
                 {"int w conj(dw')", detail::integrate(plain, [&](double x) { return w(x) * std::conj(wp.df(x)); }, 1)}};
  return r.close();
}

namespace detail {

inline cplx lifted_boundary(const KernelOperator& P, double sigma, const Profile& w, const Profile& wp,
                            const IdentityOptions& opt, double& fit_error) {
  const double a = P.a;
  auto t = lifted_trace(w, a, sigma, opt), tp = lifted_trace(wp, a, sigma, opt);
  fit_error = std::max(t.extrapolation_error, tp.extrapolation_error);
  return std::pow(std::tgamma(a + 1), 2) * principal_at(P, 0.0, 1.0) * t.value * std::conj(tp.value);
}

/// <P u, d u'> + <d u, P* u'> against boundary and commutator terms for lifted half-line data.
inline IdentityReport halfline_operator_ibp(std::string id, const KernelOperator& P, double sigma, const Profile& w,
                                            const Profile& wp, const IdentityOptions& opt, bool with_commutator) {
  const double a = P.a;
  require(a > 0 && a < 1, "identity", "a must lie in (0, 1)");
  auto u = WeightedFunction::lift(w, a, sigma), up = WeightedFunction::lift(wp, a, sigma);
  const double reach = std::max(u.reach, up.reach);
  const auto sup = KernelSupport::half_line(reach);
  auto nodes = halfline_nodes(a - 1, reach, opt.nodes);
  IdentityReport r;
  r.id = std::move(id);
  r.lhs_terms = {
      {"int Pu conj(du')", integrate(nodes, [&](double x) { return P.apply(u, x, sup) * std::conj(up.g(x)); }, opt.threads)},
      {"int du conj(P*u')",
       integrate(nodes, [&](double x) { return u.g(x) * std::conj(P.apply_adjoint(up, x, sup)); }, opt.threads)}};
  double fit = 0;
  r.rhs_terms = {{"boundary", lifted_boundary(P, sigma, w, wp, opt, fit)}};
  if (with_commutator) {
    auto weighted = halfline_nodes(a, reach, opt.nodes);
    r.rhs_terms.push_back(
        {"commutator",
         integrate(weighted, [&](double x) { return P.apply_commutator(u, x, sup) * std::conj(up.v(x)); }, opt.threads)});
  }
  r.diagnostics = {{"trace_fit_error", fit}};
  return r.close();
}

}  // namespace detail

/// The same half-line report with its boundary term recomputed for other trace options; the integrals do
/// not depend on the trace grid, so refinement studies reuse them.
inline IdentityReport retrace_halfline(IdentityReport r, const KernelOperator& P, double sigma, const Profile& w,
                                       const Profile& wp, const IdentityOptions& opt) {
  double fit = 0;
  for (auto& t : r.rhs_terms)
    if (t.name == "boundary") t.value = detail::lifted_boundary(P, sigma, w, wp, opt, fit);
  r.diagnostics = {{"trace_fit_error", fit}};
  return r.close();
}

/// Helmholtz operator (-Delta + m^2)^a with lifts through Xi_{m,+}^{-a}:
/// <P u, d u'> + <d u, P u'> = Gamma(a+1)^2 gamma_0(x^{-a} u) conj(gamma_0(x^{-a} u')).
inline IdentityReport verify_ibp_helmholtz(const Profile& w, const Profile& wp, double a, double m,
                                           const IdentityOptions& opt = {}) {
  require(m > 0, "identity", "mass must be positive");
  return detail::halfline_operator_ibp("ibp_helmholtz", KernelOperator::helmholtz(a, m), m, w, wp, opt, false);
}

/// The same balance for (-Delta)^a with lifts through Xi_+^{-a}.
inline IdentityReport verify_ibp_fraclap(const Profile& w, const Profile& wp, double a, const IdentityOptions& opt = {}) {
  return detail::halfline_operator_ibp("ibp_fraclap", KernelOperator::fractional_laplacian(a), 1.0, w, wp, opt, false);
}

/// General even operator: adds s_0 to the boundary term and the commutator <[P, d] u, u'>.
inline IdentityReport verify_ibp_general(const KernelOperator& P, const Profile& w, const Profile& wp,
                                         const IdentityOptions& opt = {}) {
  return detail::halfline_operator_ibp("ibp_general", P, 1.0, w, wp, opt, true);
}

/// Minus-type factor P^- = Xi_-^a c with u' = Xi_+^{-a} e^+ w0 and w' = r^+ P^-* u' = conj(c) w0:
/// <r^+ P^- e^+ w, d u'> = nu gamma_0 w conj(gamma_0 w') + <w, d w'> + <w, [P^-*, d] u'>.
inline IdentityReport verify_minus_factor(const Profile& w, const Profile& w0, double a, const Profile& c = sine_coefficient(),
                                          const IdentityOptions& opt = {}) {
  require(a > 0 && a < 1, "identity", "a must lie in (0, 1)");
  auto up = WeightedFunction::lift(w0, a, 1.0);
  auto cw = c.times(w);
  auto wp = c.conj().times(w0);
  auto nodes = detail::halfline_nodes(a - 1, up.reach, opt.nodes);
  auto plain = detail::halfline_nodes(0.0, up.reach, opt.nodes);
  IdentityReport r;
  r.id = "minus_factor";
  r.lhs_terms = {{"int r+P-e+w conj(du')",
                  detail::integrate(nodes, [&](double x) { return detail::minus_order_reduce(cw, a, 1.0, x) * std::conj(up.g(x)); },
                                    opt.threads)}};
  const double normal = 1.0;
  r.rhs_terms = {{"boundary", normal * w(0.0) * std::conj(wp(0.0))},
                 {"int w conj(dw')", detail::integrate(plain, [&](double x) { return w(x) * std::conj(wp.df(x)); }, 1)},
                 {"commutator", detail::integrate(plain, [&](double x) { return w(x) * std::conj(-std::conj(c.df(x)) * w0(x)); }, 1)}};
  return r.close();
}

// ---------------------------------------------------------------------------
// Interval identities

/// <P u, u'> = <u, P* u'> for u, u' supported in [-1, 1].
inline IdentityReport verify_pairing(const KernelOperator& P, const WeightedFunction& u, const WeightedFunction& up,
                                     const IdentityOptions& opt = {}) {
  const double a = u.a;
  const auto sup = KernelSupport::interval();
  auto nodes = detail::interval_nodes(a, opt.nodes + 8);
  IdentityReport r;
  r.id = "pairing";
  r.lhs_terms = {{"int Pu conj(u')",
                  detail::integrate(nodes, [&](double x) { return P.apply(u, x, sup) * std::conj(up.v(x)); }, opt.threads)}};
  r.rhs_terms = {{"int u conj(P*u')",
                  detail::integrate(nodes, [&](double x) { return u.v(x) * std::conj(P.apply_adjoint(up, x, sup)); }, opt.threads)}};
  return r.close();
}

namespace detail {

inline std::vector<IdentityTerm> boundary_terms(const KernelOperator& P, const WeightedFunction& u, const WeightedFunction& up,
                                                bool radial, const IdentityOptions& opt, double& fit_error) {
  const double g2 = std::pow(std::tgamma(u.a + 1), 2);
  std::vector<IdentityTerm> terms;
  fit_error = 0;
  for (double b : u.domain.boundary()) {
    double nu = u.domain.interior_normal(b);
    auto t = domain_trace(u, b, opt), tp = domain_trace(up, b, opt);
    fit_error = std::max({fit_error, t.extrapolation_error, tp.extrapolation_error});
    double geometric = radial ? b * nu : nu;
    terms.push_back({b < 0 ? "boundary_left" : "boundary_right",
                     g2 * geometric * principal_at(P, b, nu) * t.value * std::conj(tp.value)});
  }
  return terms;
}

}  // namespace detail

/// int Pu conj(d u') + int du conj(P* u') = Gamma(a+1)^2 sum nu s_0 tr tr' + <[P, d] u, u'> on [-1, 1].
inline IdentityReport verify_ibp_domain(const KernelOperator& P, const WeightedFunction& u, const WeightedFunction& up,
                                        const IdentityOptions& opt = {}) {
  require(u.domain.kind == Domain::Kind::interval && up.domain.kind == Domain::Kind::interval, "identity",
          "domain identities are posed on [-1, 1]");
  const double a = u.a;
  const auto sup = KernelSupport::interval();
  auto singular = detail::interval_nodes(a - 1, opt.nodes + 8), weighted = detail::interval_nodes(a, opt.nodes + 8);
  IdentityReport r;
  r.id = "ibp_domain";
  r.lhs_terms = {
      {"int Pu conj(du')",
       detail::integrate(singular, [&](double x) { return P.apply(u, x, sup) * std::conj(up.g(x)); }, opt.threads)},
      {"int du conj(P*u')",
       detail::integrate(singular, [&](double x) { return u.g(x) * std::conj(P.apply_adjoint(up, x, sup)); }, opt.threads)}};
  double fit = 0;
  r.rhs_terms = detail::boundary_terms(P, u, up, false, opt, fit);
  r.rhs_terms.push_back(
      {"commutator",
       detail::integrate(weighted, [&](double x) { return P.apply_commutator(u, x, sup) * std::conj(up.v(x)); }, opt.threads)});
  r.diagnostics = {{"trace_fit_error", fit}};
  return r.close();
}

struct RadialReport {
  IdentityReport general;      // boundary, -n <Pu, u'> and <[P, x d] u, u'>
  IdentityReport homogeneous;  // boundary and (2a - n) <Pu, u'>, valid when P1 = 2a P and P2 = 0
  cplx p2_term = 0.0;          // <x c' L u, u'>
  double homogeneity_defect = 0.0;  // |<(P1 - 2aP) u, u'>| / max(|<P u, u'>|, tiny)
  bool homogeneous_symbol = false;
};

/// int (Pu conj(x du') + x du conj(P* u')) = Gamma(a+1)^2 sum (x.nu) s_0 tr tr' - n <Pu, u'> + <[P, x d] u, u'>.
inline RadialReport verify_radial(const KernelOperator& P, const WeightedFunction& u, const WeightedFunction& up,
                                  const IdentityOptions& opt = {}, double homogeneity_tol = 1e-8) {
  require(u.domain.kind == Domain::Kind::interval && up.domain.kind == Domain::Kind::interval, "identity",
          "domain identities are posed on [-1, 1]");
  const double a = u.a;
  const int n = 1;
  const auto sup = KernelSupport::interval();
  auto singular = detail::interval_nodes(a - 1, opt.nodes + 8), weighted = detail::interval_nodes(a, opt.nodes + 8);
  std::vector<IdentityTerm> lhs{
      {"int Pu conj(x du')",
       detail::integrate(singular, [&](double x) { return P.apply(u, x, sup) * std::conj(x * up.g(x)); }, opt.threads)},
      {"int x du conj(P*u')",
       detail::integrate(singular, [&](double x) { return x * u.g(x) * std::conj(P.apply_adjoint(up, x, sup)); },
                         opt.threads)}};
  double fit = 0;
  auto boundary = detail::boundary_terms(P, u, up, true, opt, fit);
  cplx pairing = detail::integrate(weighted, [&](double x) { return P.apply(u, x, sup) * std::conj(up.v(x)); }, opt.threads);
  cplx p1 = detail::integrate(weighted, [&](double x) { return P.apply_xi_radial(u, x, sup) * std::conj(up.v(x)); }, opt.threads);
  cplx p2 = detail::integrate(weighted, [&](double x) { return P.apply_x_radial(u, x, sup) * std::conj(up.v(x)); }, opt.threads);

  RadialReport rep;
  rep.general.id = "radial";
  rep.general.lhs_terms = lhs;
  rep.general.rhs_terms = boundary;
  rep.general.rhs_terms.push_back({"-n int Pu conj(u')", -double(n) * pairing});
  rep.general.rhs_terms.push_back({"commutator", p1 - p2});
  rep.general.diagnostics = {{"trace_fit_error", fit}};
  rep.general.close();

  rep.homogeneous.id = "radial_homogeneous";
  rep.homogeneous.lhs_terms = lhs;
  rep.homogeneous.rhs_terms = boundary;
  rep.homogeneous.rhs_terms.push_back({"(2a-n) int Pu conj(u')", (2 * a - n) * pairing});
  rep.homogeneous.diagnostics = {{"trace_fit_error", fit}};
  rep.homogeneous.close();

  rep.p2_term = p2;
  rep.homogeneity_defect = std::abs(p1 - 2 * a * pairing) / std::max(std::abs(pairing), 1e-300);
  rep.homogeneous_symbol = rep.homogeneity_defect <= homogeneity_tol && std::abs(p2) <= homogeneity_tol;
  return rep;
}

struct PohozaevReport {
  IdentityReport general;      // with <[P, x d] u, u>
  IdentityReport homogeneous;  // with the (n - 2a) coefficient, for P1 = 2a P
  double equation_residual = 0.0;  // max |r^+ P u - f(u)| / max |f(u)| at Gauss nodes
};

/// For real u with r^+ P u = f(u) on [-1, 1] and P self-adjoint:
/// -2n int F(u) + n int f(u) u = Gamma(a+1)^2 sum (x.nu) s_0 tr^2 + <[P, x d] u, u>.
inline PohozaevReport verify_pohozaev(const KernelOperator& P, const Nonlinearity& nl, const WeightedFunction& u,
                                      const IdentityOptions& opt = {}) {
  require(u.domain.kind == Domain::Kind::interval, "identity", "the Pohozaev identity is posed on [-1, 1]");
  require(std::abs(P.a - u.a) < 1e-14, "identity", "operator order and weight exponent differ");
  const double a = u.a;
  const int n = 1;
  const auto sup = KernelSupport::interval();
  auto real_u = [&](double x) { return u(x).real(); };

  PohozaevReport rep;
  {
    const auto& gl = quad::gauss_legendre(opt.nodes + 8);
    double worst = 0, scale = 0;
    std::vector<double> err(gl.size()), ref(gl.size());
    detail::parallel_for(gl.size(), detail::default_threads(opt.threads), [&](std::size_t k) {
      double x = gl.nodes[k];
      double fx = nl.f(real_u(x));
      err[k] = std::abs(P.apply(u, x, sup) - fx);
      ref[k] = std::abs(fx);
    });
    for (std::size_t k = 0; k < gl.size(); ++k) worst = std::max(worst, err[k]), scale = std::max(scale, ref[k]);
    rep.equation_residual = scale > 0 ? worst / scale : worst;
  }
  quad::TanhSinh ts;
  cplx intF = ts(-1.0, 1.0, [&](double x) { return cplx(nl.F(real_u(x))); });
  cplx intfu = ts(-1.0, 1.0, [&](double x) { double t = real_u(x); return cplx(nl.f(t) * t); });
  double fit = 0;
  auto boundary = detail::boundary_terms(P, u, u, true, opt, fit);
  auto weighted = detail::interval_nodes(a, opt.nodes + 8);
  cplx comm = detail::integrate(weighted, [&](double x) { return P.apply_radial_commutator(u, x, sup) * std::conj(u.v(x)); },
                                opt.threads);

  rep.general.id = "pohozaev";
  rep.general.lhs_terms = {{"-2n int F(u)", -2.0 * n * intF}, {"n int f(u) u", double(n) * intfu}};
  rep.general.rhs_terms = boundary;
  rep.general.rhs_terms.push_back({"commutator", comm});
  rep.general.diagnostics = {{"trace_fit_error", fit}, {"equation_residual", rep.equation_residual}};
  rep.general.close();

  rep.homogeneous.id = "pohozaev_homogeneous";
  rep.homogeneous.lhs_terms = {{"-2n int F(u)", -2.0 * n * intF}, {"(n-2a) int f(u) u", (n - 2 * a) * intfu}};
  rep.homogeneous.rhs_terms = boundary;
  rep.homogeneous.diagnostics = rep.general.diagnostics;
  rep.homogeneous.close();
  return rep;
}

// ---------------------------------------------------------------------------
// Positivity and the nonexistence sign chain

/// Quadratic form (1/2pi) int M(xi) |u^(xi)|^2 dxi for real u = (1-x^2)^a sum c_k P_k^{(a,a)}, through the
/// closed-form transforms. M must be even and nonnegative: the tail beyond |xi| = cutoff is dropped, so the
/// value is a lower bound.
class FrequencyForm {
 public:
  FrequencyForm(double a, int degree, double cutoff = 400.0, int nodes_per_unit = 16) : a_(a), degree_(degree) {
    const auto& gl = quad::gauss_legendre(nodes_per_unit);
    for (double lo = 0; lo < cutoff; lo += 1.0)
      for (std::size_t k = 0; k < gl.size(); ++k) {
        xi_.push_back(lo + 0.5 * (1 + gl.nodes[k]));
        w_.push_back(0.5 * gl.weights[k]);
      }
    table_.resize(xi_.size() * (degree + 1));
    for (std::size_t j = 0; j < xi_.size(); ++j)
      for (int k = 0; k <= degree; ++k) table_[j * (degree + 1) + k] = special::weighted_jacobi_fourier(a, k, xi_[j]);
  }
  double a() const { return a_; }
  int degree() const { return degree_; }

  template <class M>
  double operator()(M&& multiplier, const std::vector<double>& coeffs) const {
    require(int(coeffs.size()) <= degree_ + 1, "positivity", "more coefficients than tabulated degrees");
    double s = 0;
    for (std::size_t j = 0; j < xi_.size(); ++j) {
      cplx uh = 0;
      for (std::size_t k = 0; k < coeffs.size(); ++k) uh += coeffs[k] * table_[j * (degree_ + 1) + k];
      s += w_[j] * multiplier(xi_[j]) * std::norm(uh);
    }
    return s / pi;  // both half-lines of the even integrand, over 2 pi
  }

 private:
  double a_;
  int degree_;
  std::vector<double> xi_, w_;
  std::vector<cplx> table_;
};

/// int u^2 for u = (1-x^2)^a sum c_k P_k^{(a,a)}.
inline double weighted_norm_sq(double a, const std::vector<double>& coeffs) {
  const auto& gj = quad::cached_gauss_jacobi(int(coeffs.size()) + 4, 2 * a, 2 * a);
  double s = 0;
  std::vector<double> p;
  for (std::size_t i = 0; i < gj.size(); ++i) {
    special::jacobi_all(int(coeffs.size()) - 1, a, a, gj.nodes[i], p);
    double v = 0;
    for (std::size_t k = 0; k < coeffs.size(); ++k) v += coeffs[k] * p[k];
    s += gj.weights[i] * v * v;
  }
  return s;
}

struct PositivityReport {
  std::vector<double> ratios;  // form / ||u||^2 per sample
  double min_ratio = INFINITY;
  double margin = 1e-3;
  bool pass = false;
};

/// Checks form(u) >= margin ||u||^2 on every sample; a numerically zero sample is an error.
template <class M>
PositivityReport positivity_analysis(const FrequencyForm& form, M&& multiplier, const std::vector<std::vector<double>>& samples,
                                     double margin = 1e-3) {
  PositivityReport rep;
  rep.margin = margin;
  for (const auto& c : samples) {
    double norm = weighted_norm_sq(form.a(), c);
    require(norm > 1e-24, "positivity", "sample function is numerically zero");
    double q = form(multiplier, c);
    rep.ratios.push_back(q / norm);
    rep.min_ratio = std::min(rep.min_ratio, q / norm);
  }
  rep.pass = !samples.empty() && rep.min_ratio >= margin;
  return rep;
}

/// Symbols of P1 = Op(xi d_xi p) and P3 = 2a m^2 (-Delta+m^2)^{a-1} for the Helmholtz operator.
inline double helmholtz_p1_symbol(double a, double m, double xi) {
  return 2 * a * xi * xi * std::pow(xi * xi + m * m, a - 1);
}
inline double helmholtz_p3_symbol(double a, double m, double xi) {
  return 2 * a * m * m * std::pow(xi * xi + m * m, a - 1);
}

/// (n + 2a) / (n - 2a), the exponent from which the Helmholtz power nonlinearity admits no solution.
inline double critical_exponent(int n, double a) {
  require(n > 2 * a, "identity", "critical exponent needs n > 2a");
  return (n + 2 * a) / (n - 2 * a);
}

struct SignChainReport {
  double coefficient = 0;    // [(n-2a) r - (n+2a)] / (r+1)
  double power_term = 0;     // int |u|^{r+1}
  double p3_term = 0;        // <P3 u, u>
  double boundary_term = 0;  // Gamma(a+1)^2 sum (x.nu) s_0 tr^2
  double critical = 0;
  bool coefficient_nonnegative = false, p3_positive = false, boundary_nonpositive = false;
  bool contradiction = false;  // lhs > 0 >= rhs, so u cannot solve the problem unless u = 0
};

/// Sign bookkeeping for (-Delta+m^2)^a u = |u|^{r-1} u on [-1, 1], evaluated on a candidate u given by its
/// Jacobi coefficients: the identity would force coefficient * int|u|^{r+1} + <P3 u, u> = boundary term.
inline SignChainReport nonexistence_sign_chain(double a, double m, double r, const std::vector<double>& coeffs, int n = 1) {
  require(n == 1, "identity", "the interval model is one-dimensional");
  SignChainReport s;
  s.critical = critical_exponent(n, a);
  s.coefficient = ((n - 2 * a) * r - (n + 2 * a)) / (r + 1);
  std::vector<cplx> cc(coeffs.begin(), coeffs.end());
  auto u = WeightedFunction::jacobi(a, cc);
  quad::TanhSinh ts;
  s.power_term = ts(-1.0, 1.0, [&](double x) { return cplx(std::pow(std::abs(u(x)), r + 1)); }).real();
  FrequencyForm form(a, int(coeffs.size()) - 1);
  s.p3_term = form([&](double xi) { return helmholtz_p3_symbol(a, m, xi); }, coeffs);
  const double g2 = std::pow(std::tgamma(a + 1), 2);
  for (double b : {-1.0, 1.0}) {
    double nu = u.domain.interior_normal(b);
    s.boundary_term += g2 * b * nu * std::norm(u.exact_trace(b));  // s_0 = 1 for the Helmholtz symbol
  }
  s.coefficient_nonnegative = s.coefficient >= -1e-15;
  s.p3_positive = s.p3_term > 0;
  s.boundary_nonpositive = s.boundary_term <= 0;
  s.contradiction = s.coefficient_nonnegative && s.p3_positive && s.boundary_nonpositive;
  return s;
}

}  // namespace wh
