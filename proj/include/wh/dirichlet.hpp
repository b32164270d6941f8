#pragma once

// Fractional Dirichlet problems on the interval, lifted half-line data, and weighted traces.

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include "operators.hpp"

namespace wh {

// ---------------------------------------------------------------------------
// Smooth data on the closed half-line

/// A smooth function with two derivatives. p(x) e^{-beta x} profiles also carry their
/// polynomial so the order-reducing lift has a closed form.
struct Profile {
  std::function<cplx(double)> f, df, d2f;
  std::vector<cplx> poly;  // nonempty for p(x) e^{-beta x}
  double beta = 0.0;
  double decay = 1.0;  // exponential rate used to truncate half-line integrals

  cplx operator()(double x) const { return f(x); }
  bool closed_form() const { return !poly.empty(); }

  static Profile poly_exp(std::vector<cplx> p, double beta) {
    require(!p.empty() && beta > 0, "profile", "need a polynomial and beta > 0");
    Profile r;
    r.poly = p;
    r.beta = beta;
    r.decay = beta;
    auto dp = derivative_coeffs(p), d2p = derivative_coeffs(dp);
    r.f = [p, beta](double x) { return horner(p, x) * std::exp(-beta * x); };
    r.df = [p, dp, beta](double x) { return (horner(dp, x) - beta * horner(p, x)) * std::exp(-beta * x); };
    r.d2f = [p, dp, d2p, beta](double x) {
      return (horner(d2p, x) - 2 * beta * horner(dp, x) + beta * beta * horner(p, x)) * std::exp(-beta * x);
    };
    return r;
  }
  static Profile exponential(double beta = 1.0) { return poly_exp({1.0}, beta); }

  static Profile smooth(std::function<cplx(double)> f, std::function<cplx(double)> df,
                        std::function<cplx(double)> d2f, double decay) {
    Profile r;
    r.f = std::move(f);
    r.df = std::move(df);
    r.d2f = std::move(d2f);
    r.decay = decay;
    return r;
  }
  /// e^{-x^2}
  static Profile gaussian() {
    return smooth([](double x) { return cplx(std::exp(-x * x)); },
                  [](double x) { return cplx(-2 * x * std::exp(-x * x)); },
                  [](double x) { return cplx((4 * x * x - 2) * std::exp(-x * x)); }, 4.0);
  }
  /// x e^{-x^2}, vanishing at 0.
  static Profile x_gaussian() {
    return smooth([](double x) { return cplx(x * std::exp(-x * x)); },
                  [](double x) { return cplx((1 - 2 * x * x) * std::exp(-x * x)); },
                  [](double x) { return cplx((4 * x * x * x - 6 * x) * std::exp(-x * x)); }, 4.0);
  }

  /// f' as a profile; its second derivative is only known in the closed-form family.
  Profile derivative() const {
    if (closed_form()) {
      auto dp = derivative_coeffs(poly);
      std::vector<cplx> q(poly.size());
      for (std::size_t k = 0; k < poly.size(); ++k) q[k] = (k < dp.size() ? dp[k] : cplx(0)) - beta * poly[k];
      return poly_exp(q, beta);
    }
    Profile r = *this;
    r.f = df;
    r.df = d2f;
    r.d2f = nullptr;
    return r;
  }

  Profile times(const Profile& o) const {
    if (closed_form() && o.closed_form()) {
      std::vector<cplx> q(poly.size() + o.poly.size() - 1, 0.0);
      for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = 0; j < o.poly.size(); ++j) q[i + j] += poly[i] * o.poly[j];
      return poly_exp(q, beta + o.beta);
    }
    auto A = *this, B = o;
    return smooth([A, B](double x) { return A.f(x) * B.f(x); },
                  [A, B](double x) { return A.df(x) * B.f(x) + A.f(x) * B.df(x); },
                  [A, B](double x) { return A.d2f(x) * B.f(x) + 2.0 * A.df(x) * B.df(x) + A.f(x) * B.d2f(x); },
                  decay + o.decay);
  }

  Profile conj() const {
    if (closed_form()) {
      std::vector<cplx> q(poly);
      for (auto& c : q) c = std::conj(c);
      return poly_exp(q, beta);
    }
    auto A = *this;
    return smooth([A](double x) { return std::conj(A.f(x)); }, [A](double x) { return std::conj(A.df(x)); },
                  [A](double x) { return std::conj(A.d2f(x)); }, decay);
  }

  static std::vector<cplx> derivative_coeffs(const std::vector<cplx>& p) {
    std::vector<cplx> d;
    for (std::size_t k = 1; k < p.size(); ++k) d.push_back(double(k) * p[k]);
    if (d.empty()) d.push_back(0.0);
    return d;
  }
  static cplx horner(const std::vector<cplx>& p, double x) {
    cplx s = 0;
    for (std::size_t k = p.size(); k-- > 0;) s = s * x + p[k];
    return s;
  }
};

/// Bounded non-oscillating coefficient for modulated operators: 1 + s sin(x).
inline Profile sine_coefficient(double s = 0.5) {
  return Profile::smooth([s](double x) { return cplx(1 + s * std::sin(x)); },
                         [s](double x) { return cplx(s * std::cos(x)); },
                         [s](double x) { return cplx(-s * std::sin(x)); }, 0.0);
}

namespace detail {

/// int_0^1 t^{c-1} e^{-z t} dt for c > 0 and any real z.
inline double unit_gamma_moment(double c, double z) {
  if (z > 1.0) return boost::math::tgamma_lower(c, z) * std::pow(z, -c);
  double term = 1.0, sum = 1.0 / c;
  for (int k = 1; k < 2000; ++k) {
    term *= -z / k;
    double t = term / (c + k);
    sum += t;
    if (std::abs(t) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Weighted functions on the model domains

/// The half-line [0, inf) or the interval [-1, 1]; normals point into the domain.
struct Domain {
  enum class Kind { half_line, interval };
  Kind kind = Kind::interval;

  static Domain half_line() { return {Kind::half_line}; }
  static Domain interval() { return {Kind::interval}; }

  bool contains(double x) const { return kind == Kind::half_line ? x >= 0 : std::abs(x) <= 1; }
  /// omega(x) = x or 1 - x^2; u = omega^a v on the domain.
  double weight(double x) const { return kind == Kind::half_line ? x : (1 - x) * (1 + x); }
  std::vector<double> boundary() const {
    return kind == Kind::half_line ? std::vector<double>{0.0} : std::vector<double>{-1.0, 1.0};
  }
  double interior_normal(double b) const { return kind == Kind::half_line || b < 0 ? 1.0 : -1.0; }
  /// lim omega / dist at the boundary, raised to a.
  double trace_factor(double a) const { return kind == Kind::half_line ? 1.0 : std::pow(2.0, a); }
  Region region() const { return kind == Kind::half_line ? Region::plus(0.0) : Region::interval(-1.0, 1.0); }
};

/// u = omega^a v on the domain, zero outside, with v and g = omega^{1-a} u' smooth on the closed domain.
struct WeightedFunction {
  Domain domain;
  double a = 0.5;
  std::function<cplx(double)> v, g;
  double reach = 1.0;  // beyond this distance from 0 the function is negligible

  cplx operator()(double x) const {
    if (!domain.contains(x)) return 0.0;
    double w = domain.weight(x);
    return w > 0 ? std::pow(w, a) * v(x) : cplx(0.0);
  }
  cplx derivative(double x) const { return std::pow(domain.weight(x), a - 1) * g(x); }
  /// gamma_0(d^{-a} u) at a boundary point, from the smooth factor.
  cplx exact_trace(double b) const { return domain.trace_factor(a) * v(b); }

  KernelSupport support() const {
    return domain.kind == Domain::Kind::half_line ? KernelSupport::half_line(reach) : KernelSupport::interval();
  }
  GridFunction sample(const SpaceGrid& grid) const {
    return GridFunction::sample(grid, [this](double x) { return (*this)(x); }, domain.region());
  }

  WeightedFunction conj() const {
    WeightedFunction r = *this;
    auto V = v, G = g;
    r.v = [V](double x) { return std::conj(V(x)); };
    r.g = [G](double x) { return std::conj(G(x)); };
    return r;
  }

  /// (1 - x^2)^a v(x) on [-1, 1].
  static WeightedFunction interval(double a, std::function<cplx(double)> v, std::function<cplx(double)> dv) {
    WeightedFunction r;
    r.domain = Domain::interval();
    r.a = a;
    r.v = v;
    r.g = [a, v, dv](double x) { return -2 * a * x * v(x) + (1 - x) * (1 + x) * dv(x); };
    return r;
  }

  /// (1 - x^2)^a sum_k c_k P_k^{(a,a)}(x).
  static WeightedFunction jacobi(double a, std::vector<cplx> coeffs) {
    require(!coeffs.empty(), "dirichlet", "empty coefficient list");
    const int K = int(coeffs.size()) - 1;
    auto v = [a, K, coeffs](double x) {
      thread_local std::vector<double> p;
      special::jacobi_all(K, a, a, x, p);
      cplx s = 0;
      for (int k = 0; k <= K; ++k) s += coeffs[k] * p[k];
      return s;
    };
    auto dv = [a, K, coeffs](double x) {
      thread_local std::vector<double> p;
      special::jacobi_derivative_all(K, a, a, x, p);
      cplx s = 0;
      for (int k = 1; k <= K; ++k) s += coeffs[k] * p[k];
      return s;
    };
    return interval(a, v, dv);
  }

  /// Xi_{sigma,+}^{-a} e^+ w on the half-line: (1/Gamma(a)) int_0^x s^{a-1} e^{-sigma s} w(x-s) ds.
  static WeightedFunction lift(const Profile& w, double a, double sigma = 1.0) {
    require(a > 0 && a < 1 && sigma > 0, "dirichlet", "lift needs 0 < a < 1 and sigma > 0");
    WeightedFunction r;
    r.domain = Domain::half_line();
    r.a = a;
    r.reach = 45.0 / std::min(w.decay > 0 ? w.decay : 1.0, sigma);
    auto vw = lift_factor(w, a, sigma);
    auto vdw = lift_factor(w.derivative(), a, sigma);
    const cplx w0 = w(0.0);
    const double ga = std::tgamma(a);
    r.v = vw;
    // u' = Xi^{-a} e^+ w' + w(0) s^{a-1} e^{-sigma s} / Gamma(a)
    r.g = [vdw, w0, ga, sigma](double x) { return w0 * std::exp(-sigma * x) / ga + x * vdw(x); };
    return r;
  }

  /// x^{-a} Xi^{-a} e^+ w as a function of x >= 0.
  static std::function<cplx(double)> lift_factor(const Profile& w, double a, double sigma) {
    const double ga = std::tgamma(a);
    if (w.closed_form()) {
      // w(x-s) = e^{-beta x} e^{beta s} sum_j q_j(x) s^j with q_j = (-1)^j p^{(j)} / j!
      std::vector<std::vector<cplx>> derivs{w.poly};
      while (derivs.back().size() > 1) derivs.push_back(Profile::derivative_coeffs(derivs.back()));
      const double beta = w.beta, lam = sigma - beta;
      return [derivs, beta, lam, a, ga](double x) {
        cplx s = 0;
        double fact = 1, xj = 1;
        for (std::size_t j = 0; j < derivs.size(); ++j) {
          if (j > 0) fact *= double(j), xj *= x;
          double sign = j % 2 ? -1.0 : 1.0;
          s += sign / fact * Profile::horner(derivs[j], x) * xj * detail::unit_gamma_moment(a + double(j), lam * x);
        }
        return s * std::exp(-beta * x) / ga;
      };
    }
    auto f = w.f;
    return [f, a, ga, sigma](double x) {
      const auto& gj = quad::cached_gauss_jacobi(40, 0.0, a - 1);
      if (x <= 2.0) {
        // s = x t on [0, 1]: x^{-a} u = int_0^1 t^{a-1} e^{-sigma x t} w(x(1-t)) dt / Gamma(a)
        cplx s = 0;
        for (std::size_t k = 0; k < gj.size(); ++k) {
          double t = 0.5 * (1 + gj.nodes[k]);
          s += gj.weights[k] * std::exp(-sigma * x * t) * f(x * (1 - t));
        }
        return s * std::pow(0.5, a) / ga;
      }
      cplx head = 0;
      for (std::size_t k = 0; k < gj.size(); ++k) {
        double t = 0.5 * (1 + gj.nodes[k]);
        head += gj.weights[k] * std::exp(-sigma * t) * f(x - t);
      }
      head *= std::pow(0.5, a);
      cplx tail = quad::composite({}, 1.0, x, [&](double s) { return std::pow(s, a - 1) * std::exp(-sigma * s) * f(x - s); },
                                  int(std::ceil(x)), 24);
      return (head + tail) / ga * std::pow(x, -a);
    };
  }
};

/// Integral of F(x) omega(x)^alpha over the domain (alpha > -1).
template <class F>
cplx domain_integral(const Domain& dom, double alpha, F&& f, double reach = 45.0, int nodes = 48) {
  if (dom.kind == Domain::Kind::half_line) return quad::power_weighted(alpha, reach, [&](double x) { return cplx(f(x)); }, 0.5, nodes);
  const auto& r = quad::cached_gauss_jacobi(nodes, alpha, alpha);
  cplx s = 0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * cplx(f(r.nodes[k]));
  return s;
}

// ---------------------------------------------------------------------------
// The lift on the grid

/// u = Xi_{sigma,+}^{-a} e^+ w sampled on the grid by product integration: e^{-sigma s} w(x - s) is
/// interpolated linearly in s and the power s^{a-1} is integrated exactly on every cell.
/// Samples of w with x < 0 are ignored.
inline GridFunction hspace_lift(const GridFunction& w, double a, double sigma = 1.0) {
  require(a >= 0 && a < 1 && sigma > 0, "dirichlet", "lift needs 0 <= a < 1 and sigma > 0");
  const auto& g = w.grid();
  const double h = g.spacing();
  const std::size_t k0 = g.index_at_or_above(0.0);
  require(std::abs(g.x(k0)) < 1e-12 * h, "dirichlet", "the grid must contain x = 0");
  std::vector<cplx> out(g.n, 0.0);
  if (a == 0) {
    for (std::size_t k = k0; k < g.n; ++k) out[k] = w[k];
    return GridFunction(g, std::move(out), Region::plus());
  }
  const std::size_t m = g.n - k0;
  // cell weights divided by Gamma(a), written through Gamma(a+1) so that a -> 0 stays finite
  std::vector<double> A(m), B(m);
  const double ga1 = std::tgamma(a + 1), ha = std::pow(h, a);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    double m0 = (std::pow(j + 1.0, a) - std::pow(double(j), a)) * ha / ga1;            // int s^{a-1} / Gamma(a)
    double m1 = a * (std::pow(j + 1.0, a + 1) - std::pow(double(j), a + 1)) * ha / ((a + 1) * ga1);  // int s^a / (h Gamma(a))
    A[j] = (j + 1.0) * m0 - m1;
    B[j] = m1 - double(j) * m0;
  }
  std::vector<double> damp(m);
  for (std::size_t j = 0; j < m; ++j) damp[j] = std::exp(-sigma * h * double(j));
  detail::parallel_for(m, detail::default_threads(0), [&](std::size_t i) {
    cplx s = 0;
    for (std::size_t j = 0; j < i; ++j) s += A[j] * damp[j] * w[k0 + i - j] + B[j] * damp[j + 1] * w[k0 + i - j - 1];
    out[k0 + i] = s;
  });
  return GridFunction(g, std::move(out), Region::plus());
}

// ---------------------------------------------------------------------------
// Weighted traces

struct TraceValue {
  cplx value = 0.0;
  double boundary = 0.0;
  double extrapolation_error = 0.0;  // largest residual of the polynomial fit
  double exponent = 0.0;             // fitted local power of |u| in d
};

/// gamma_0(d^{-a} u) at a boundary point: u / d^a on the nodes with d in [h, 10h] is fitted by a
/// quadratic in d and evaluated at d = 0. interior = +1 when the domain lies on x > boundary.
/// The local exponent of |u| must be within 0.1 of a, or exceed a + 0.5 (the trace vanishes); between throws.
inline TraceValue weighted_trace(const GridFunction& u, double a, double boundary, int interior) {
  require(interior == 1 || interior == -1, "trace", "interior side must be +1 or -1");
  const auto& g = u.grid();
  const double h = g.spacing();
  std::vector<double> d;
  std::vector<cplx> q, val;
  for (std::size_t k = 0; k < g.n; ++k) {
    double dist = interior * (g.x(k) - boundary);
    if (dist < h * (1 - 1e-9) || dist > 10 * h * (1 + 1e-9)) continue;
    d.push_back(dist);
    val.push_back(u[k]);
    q.push_back(u[k] / std::pow(dist, a));
  }
  require(d.size() >= 4, "trace", "too few grid nodes next to the boundary");

  TraceValue t;
  t.boundary = boundary;
  double umax = 0;
  for (cplx v : val) umax = std::max(umax, std::abs(v));
  if (umax > 0) {
    // local exponent: log|u| = e log d + c0 + c1 d, the d term absorbing the slope of the smooth factor
    Eigen::MatrixXd L(d.size(), 3);
    Eigen::VectorXd ly(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
      L(i, 0) = std::log(d[i]), L(i, 1) = 1, L(i, 2) = d[i] / h;
      ly(i) = std::log(std::max(std::abs(val[i]), 1e-300));
    }
    t.exponent = L.colPivHouseholderQr().solve(ly)(0);
    // d^a times a nonzero smooth factor, or vanishing faster (zero trace); the slope of a d^{a+1} term
    // sitting at the grid-error level can read well below a + 1
    double excess = t.exponent - a;
    require(std::abs(excess) <= 0.1 || excess >= 0.5, "trace",
            "u does not vanish like d^a at the boundary (local exponent " + std::to_string(t.exponent) + ")");
  }
  Eigen::MatrixXcd V(d.size(), 3);
  Eigen::VectorXcd rhs(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    V(i, 0) = 1, V(i, 1) = d[i] / h, V(i, 2) = (d[i] / h) * (d[i] / h);
    rhs(i) = q[i];
  }
  auto qr = V.colPivHouseholderQr();
  Eigen::VectorXcd c = qr.solve(rhs);
  t.value = c(0);
  Eigen::VectorXcd res = V * c - rhs;
  t.extrapolation_error = res.cwiseAbs().maxCoeff();
  return t;
}

// ---------------------------------------------------------------------------
// The interval solver

struct DirichletOptions {
  int degree = 60;            // basis degrees 0..degree
  int residual_nodes = 80;    // Gauss-Legendre nodes for the reported residual
  double residual_tol = 1e-6; // above this the solve is reported as failed
  SpaceGrid grid{4096, 4.0};  // sampling grid of the returned solution
  int threads = 0;
};

struct DirichletSolution {
  GridFunction u;
  std::vector<cplx> coeffs;  // in the basis (1 - x^2)^a P_k^{(a,a)}
  double a = 0.5;
  double residual = 0.0;     // ||r^+ P u - f|| / ||f|| on the residual nodes (absolute when f = 0)
  WeightedFunction profile;  // the solution as a function
};

/// Collocation for r^+ P u = f, supp u in [-1, 1], in the weighted Jacobi basis at Gauss-Legendre nodes.
template <class F>
DirichletSolution solve_interval(const KernelOperator& P, F&& f, const DirichletOptions& opt = {}) {
  const double a = P.a;
  const int K = opt.degree;
  require(K >= 0 && opt.residual_nodes > 0, "dirichlet", "basis size must be positive");
  const auto sup = KernelSupport::interval();
  auto basis_at = [a, K](double x, std::vector<double>& p) {
    special::jacobi_all(K, a, a, x, p);
    double w = std::abs(x) < 1 ? std::pow((1 - x) * (1 + x), a) : 0.0;
    for (auto& c : p) c *= w;
  };

  const auto& nodes = quad::gauss_legendre(K + 1).nodes;
  Eigen::MatrixXcd A(K + 1, K + 1);
  Eigen::VectorXcd b(K + 1);
  detail::parallel_for(std::size_t(K + 1), detail::default_threads(opt.threads), [&](std::size_t i) {
    const double x = nodes[i];
    PointRule r = P.rule(x, sup);
    std::vector<double> p, row(K + 1, 0.0);
    for (std::size_t j = 0; j < r.points.size(); ++j) {
      basis_at(r.points[j], p);
      for (int k = 0; k <= K; ++k) row[k] += r.weights[j] * p[k];
    }
    cplx c = P.coefficient(x);
    for (int k = 0; k <= K; ++k) A(i, k) = c * row[k];
    b(i) = cplx(f(x));
  });
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  require(lu.rcond() > 1e-14, "singular", "collocation matrix is singular to working precision");
  Eigen::VectorXcd c = lu.solve(b);

  DirichletSolution s;
  s.a = a;
  s.coeffs.assign(c.data(), c.data() + c.size());
  s.profile = WeightedFunction::jacobi(a, s.coeffs);
  s.u = s.profile.sample(opt.grid);

  // residual on an independent node set
  const auto& check = quad::gauss_legendre(opt.residual_nodes);
  std::vector<double> err(check.size()), ref(check.size());
  detail::parallel_for(check.size(), detail::default_threads(opt.threads), [&](std::size_t i) {
    double x = check.nodes[i];
    cplx pu = P.apply(s.profile, x, sup);
    cplx fx = cplx(f(x));
    err[i] = check.weights[i] * std::norm(pu - fx);
    ref[i] = check.weights[i] * std::norm(fx);
  });
  double e = 0, fr = 0;
  for (std::size_t i = 0; i < err.size(); ++i) e += err[i], fr += ref[i];
  s.residual = fr > 0 ? std::sqrt(e / fr) : std::sqrt(e);
  require(s.residual <= opt.residual_tol, "residual",
          "Dirichlet residual " + std::to_string(s.residual) + " above threshold");
  return s;
}

}  // namespace wh
