#pragma once

// Wiener-Hopf factorization q = s0 q- q+ of even order-zero symbol slices, its
// lower-order recursion, and the plus-factor parametrix.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cauchy.hpp"
#include "symbols.hpp"

namespace wh {

struct FactorizeOptions {
  double ray_tol = 1e-8;        // min angular distance of q from the cut ray
  double vanish_tol = 1e-12;    // min |q| relative to max |q|
  double limit_tol = 1e-2;      // mismatch allowed between q(+inf) and q(-inf), relative
  int series_terms = 30;        // exponential-series diagnostic length
  bool diagnostics = true;      // space-side majorization checks
};

struct FactorizationResult {
  FreqSlice q_plus, q_minus;
  cplx s0 = 1.0;
  double mult_residual = 0.0;
  double plus_leak = 0.0;       // holomorphy_residual(q+ - 1, plus)
  double minus_leak = 0.0;      // holomorphy_residual(q- - 1, minus)
  double edge_plus = 0.0;       // |q+ - 1| at the outermost nodes
  double edge_minus = 0.0;
  // exponential-series diagnostics
  double psi_plus_l1 = 0.0;     // L1 norm of the inverse transform of psi+
  double psi_plus_sup = 0.0;
  double f_sup = 0.0;           // sup of the inverse transform of q+ - 1
  double majorant = 0.0;        // bound (e^L - 1)/L * sup psi for f_sup
  double series_tail = 0.0;     // max |exp(psi+) - partial sum|
  std::vector<double> xi_prime;
};

/// Logarithm with its cut along the ray arg = cut: arg in [cut - 2 pi, cut).
inline cplx log_with_cut(cplx w, double cut) {
  double lo = cut - 2 * pi;
  double t = std::arg(w) - lo;
  t -= 2 * pi * std::floor(t / (2 * pi));
  return cplx(std::log(std::abs(w)), lo + t);
}

namespace detail {

/// Angle of the cut ray for q / s0, reduced to (0, 2 pi] so that log(1) = 0.
inline double normalized_cut(double theta, cplx s0) {
  double t = theta - std::arg(s0);
  t -= 2 * pi * std::floor(t / (2 * pi));
  if (t == 0.0) t = 2 * pi;
  return t;
}

inline void check_slice_for_factorization(const FreqSlice& q, double theta, const FactorizeOptions& opt) {
  double qmax = q.max_abs(), qmin = INFINITY, margin = INFINITY;
  for (cplx v : q.values()) {
    qmin = std::min(qmin, std::abs(v));
    if (std::abs(v) > 0) margin = std::min(margin, angular_distance(std::arg(v), theta));
  }
  require(qmin > opt.vanish_tol * qmax, "vanishing", "symbol slice vanishes on the grid");
  require(margin > opt.ray_tol, "ray", "symbol slice meets the ray of the logarithm");
  double mismatch = std::abs(q.values().front() - q.values().back());
  require(mismatch <= opt.limit_tol * qmax, "limits",
          "limits at +infinity and -infinity differ: the slice is not even or not normalized");
}

/// L1 norm and sup of a space slice on x > 0, from a quadratically graded grid.
inline std::pair<double, double> half_line_norms(const SpaceSlice& u, double extent, int samples = 1500) {
  double l1 = 0, sup = 0, prev_x = 0, prev_v = std::abs(u.eval(0.0));
  sup = prev_v;
  for (int i = 1; i <= samples; ++i) {
    double x = extent * std::pow(double(i) / samples, 2);
    double v = std::abs(u.eval(x));
    l1 += 0.5 * (v + prev_v) * (x - prev_x);
    sup = std::max(sup, v);
    prev_x = x, prev_v = v;
  }
  return {l1, sup};
}

}  // namespace detail

/// Factor one slice q(xi_n) with a finite common limit at +-infinity.
/// s0 defaults to that limit; the logarithm is cut along the ray theta.
inline FactorizationResult factorize_slice(const FreqSlice& q, double theta, const FactorizeOptions& opt = {},
                                           std::optional<cplx> s0_override = std::nullopt) {
  require(q.decay() == DecayClass::zero, "cauchy", "factorization needs a slice with a finite limit");
  detail::check_slice_for_factorization(q, theta, opt);
  FactorizationResult r;
  r.s0 = s0_override ? *s0_override : q.limit_at_infinity();
  const double cut = detail::normalized_cut(theta, r.s0);
  FreqSlice psi = q.map([&](cplx v) { return log_with_cut(v / r.s0, cut); }, DecayClass::minus1);
  FreqSlice psi_plus = h_plus(psi), psi_minus = h_minus(psi);
  r.q_plus = psi_plus.map([](cplx v) { return std::exp(v); }, DecayClass::zero);
  r.q_minus = psi_minus.map([](cplx v) { return std::exp(v); }, DecayClass::zero);
  for (std::size_t k = 0; k < q.size(); ++k)
    r.mult_residual = std::max(r.mult_residual, std::abs(q[k] - r.s0 * r.q_minus[k] * r.q_plus[k]) / std::abs(q[k]));
  // a factor equal to 1 up to roundoff is one-sided; the energy ratio would only measure noise
  auto leak = [](const FreqSlice& f, Side side) {
    return f.max_abs() < 1e-12 ? 0.0 : holomorphy_residual(f, side);
  };
  r.plus_leak = leak(r.q_plus - 1.0, Side::plus);
  r.minus_leak = leak(r.q_minus - 1.0, Side::minus);
  const std::size_t last = q.size() - 1;
  r.edge_plus = std::max(std::abs(r.q_plus[0] - 1.0), std::abs(r.q_plus[last] - 1.0));
  r.edge_minus = std::max(std::abs(r.q_minus[0] - 1.0), std::abs(r.q_minus[last] - 1.0));

  if (opt.diagnostics) {
    const double extent = 60.0 / q.grid().scale;
    auto [l1, sup] = detail::half_line_norms(inverse_fourier_slice(psi_plus), extent);
    r.psi_plus_l1 = l1;
    r.psi_plus_sup = sup;
    r.f_sup = detail::half_line_norms(inverse_fourier_slice(r.q_plus - 1.0), extent).second;
    r.majorant = l1 > 0 ? std::expm1(l1) / l1 * sup : 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      cplx term = 1.0, sum = 1.0;
      for (int j = 1; j <= opt.series_terms; ++j) {
        term *= psi_plus[k] / double(j);
        sum += term;
      }
      r.series_tail = std::max(r.series_tail, std::abs(r.q_plus[k] - sum));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Slices of symbols

/// Cayley scale used for the slice at xi': the natural frequency scale of the slice.
inline double slice_scale(const std::vector<double>& xi_prime) {
  double s = 0;
  for (double v : xi_prime) s += v * v;
  return std::max(1.0, std::sqrt(s));
}

/// Normalized principal slice xi_n -> p_0(x, xi', xi_n) |xi|^{-2a}.
inline FreqSlice principal_slice(const Symbol& sym, const std::vector<double>& x, const std::vector<double>& xi_prime,
                                 std::size_t n) {
  require(int(xi_prime.size()) == sym.dim() - 1, "symbol", "xi' must have dim - 1 components");
  FreqGrid grid{n, slice_scale(xi_prime)};
  std::vector<double> xi(xi_prime);
  xi.push_back(0);
  return FreqSlice::sample(
      grid,
      [&](double t) {
        xi.back() = t;
        double r2 = 0;
        for (double v : xi) r2 += v * v;
        return sym.eval_term(0, x, xi) * std::pow(r2, -sym.a());
      },
      DecayClass::zero);
}

/// Factor the principal symbol on each xi' slice at the point x; s0 = q(x, 0, 1).
inline std::vector<FactorizationResult> factorize_principal(const Symbol& sym, const std::vector<double>& x,
                                                            const std::vector<std::vector<double>>& xi_primes,
                                                            double theta = pi, std::size_t n = 4096,
                                                            const FactorizeOptions& opt = {}) {
  auto even = check_even(sym.principal(), shell_samples(sym.dim(), 24, {1.0, 2.0}), 1e-10);
  require(even.pass, "even", "principal symbol is not even");
  auto ell = check_ellipticity_ray(sym, theta, sphere_samples(sym.dim(), 48));
  require(ell.pass, "ray", "principal symbol meets the ray");
  std::vector<double> en(sym.dim(), 0.0);
  en.back() = 1.0;
  const cplx s0 = sym.eval_term(0, x, en);
  std::vector<std::vector<double>> slices = xi_primes;
  if (sym.dim() == 1) slices = {{}};
  std::vector<FactorizationResult> out;
  for (const auto& xp : slices) {
    auto r = factorize_slice(principal_slice(sym, x, xp, n), theta, opt, s0);
    r.xi_prime = xp;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jet-valued slices and symbol expansions

/// Samples along a slice of a symbol term together with its Taylor jet in
/// (x_1..x_n, xi_1..xi_n) at every node.
struct JetSlice {
  FreqGrid grid;
  std::vector<Jet> values;

  std::size_t size() const { return values.size(); }

  static JetSlice zeros(const FreqGrid& g, int nvars, int order) {
    return {g, std::vector<Jet>(g.n, Jet::constant(0.0, nvars, order))};
  }

  int order() const {
    int o = Jet::kMaxOrder;
    for (const auto& v : values) o = std::min(o, v.order());
    return o;
  }

  /// Plain values on the slice.
  FreqSlice value_slice(DecayClass decay) const {
    std::vector<cplx> v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = values[k].value();
    return FreqSlice(grid, std::move(v), decay);
  }

  template <class F>
  JetSlice map(F&& f) const {
    JetSlice r{grid, {}};
    r.values.reserve(size());
    for (const auto& v : values) r.values.push_back(f(v));
    return r;
  }

  JetSlice partial(int var) const {
    return map([var](const Jet& j) { return j.partial(var); });
  }

  JetSlice& operator+=(const JetSlice& o) {
    for (std::size_t k = 0; k < size(); ++k) values[k] += o.values[k];
    return *this;
  }
  JetSlice& operator-=(const JetSlice& o) {
    for (std::size_t k = 0; k < size(); ++k) values[k] -= o.values[k];
    return *this;
  }
  friend JetSlice operator*(const JetSlice& a, const JetSlice& b) {
    JetSlice r{a.grid, std::vector<Jet>(a.size())};
    for (std::size_t k = 0; k < a.size(); ++k) r.values[k] = a.values[k] * b.values[k];
    return r;
  }
  friend JetSlice operator/(const JetSlice& a, const JetSlice& b) {
    JetSlice r{a.grid, std::vector<Jet>(a.size())};
    for (std::size_t k = 0; k < a.size(); ++k) r.values[k] = a.values[k] / b.values[k];
    return r;
  }
  friend JetSlice operator+(JetSlice a, const JetSlice& b) { return a += b; }
  friend JetSlice operator-(JetSlice a, const JetSlice& b) { return a -= b; }
  friend JetSlice operator*(JetSlice a, cplx s) {
    for (auto& v : a.values) v *= s;
    return a;
  }

  /// Sup over nodes of |value|.
  double max_abs() const {
    double m = 0;
    for (const auto& v : values) m = std::max(m, std::abs(v.value()));
    return m;
  }
};

/// Applies h+ or h- to every Taylor coefficient; projection commutes with the derivatives.
inline JetSlice project(const JetSlice& f, Side side) {
  JetSlice r = f;
  if (f.size() == 0) return r;
  const int comps = f.values[0].size();
  std::vector<cplx> col(f.size());
  for (int c = 0; c < comps; ++c) {
    for (std::size_t k = 0; k < f.size(); ++k) col[k] = f.values[k][c];
    FreqSlice p = project(FreqSlice(f.grid, col, DecayClass::minus1), side);
    for (std::size_t k = 0; k < f.size(); ++k) r.values[k][c] = p[k];
  }
  return r;
}

/// Terms of decreasing order: entry j has order -j.
using SymbolExpansion = std::vector<JetSlice>;

/// Where and how a symbol is sliced.
struct SliceContext {
  Symbol sym;
  std::vector<double> x;
  std::vector<double> xi_prime;
  std::size_t n = 4096;
  int jet_order = 2;

  int nvars() const { return 2 * sym.dim(); }
  FreqGrid grid() const { return {n, slice_scale(xi_prime)}; }

  /// Jets of x (variables 0..n-1) and xi (variables n..2n-1) at node t.
  std::pair<std::vector<Jet>, std::vector<Jet>> seeds(double t) const {
    const int d = sym.dim();
    std::vector<Jet> xs, xis;
    for (int i = 0; i < d; ++i) xs.push_back(Jet::variable(x[i], i, nvars(), jet_order));
    for (int i = 0; i + 1 < d; ++i) xis.push_back(Jet::variable(xi_prime[i], d + i, nvars(), jet_order));
    xis.push_back(Jet::variable(t, 2 * d - 1, nvars(), jet_order));
    return {xs, xis};
  }
};

/// Normalized symbol q = p |xi|^{-2a} sliced, grouped by classical index up to K.
inline SymbolExpansion normalized_expansion(const SliceContext& ctx, int K) {
  require(ctx.sym.dim() <= 2, "factorization", "expansions support dimension 1 or 2");
  require(int(ctx.x.size()) == ctx.sym.dim() && int(ctx.xi_prime.size()) == ctx.sym.dim() - 1, "factorization",
          "slice point has the wrong dimension");
  FreqGrid g = ctx.grid();
  SymbolExpansion out;
  for (int j = 0; j <= K; ++j) out.push_back(JetSlice::zeros(g, ctx.nvars(), ctx.jet_order));
  for (std::size_t k = 0; k < g.n; ++k) {
    auto [xs, xis] = ctx.seeds(g.node(k));
    Jet weight = pow(squared_norm(std::span<const Jet>(xis)), -ctx.sym.a());
    for (std::size_t t = 0; t < ctx.sym.term_count(); ++t) {
      int j = ctx.sym.term(t).index;
      if (j > K) continue;
      out[j].values[k] += ctx.sym.eval_term_jet(t, xs, xis) * weight;
    }
  }
  return out;
}

namespace detail {

/// Multi-indices alpha over the xi variables with |alpha| = deg (dimension d).
inline std::vector<std::array<int, 2>> multi_indices(int d, int deg) {
  std::vector<std::array<int, 2>> out;
  if (d == 1) return {{deg, 0}};
  for (int i = deg; i >= 0; --i) out.push_back({i, deg - i});
  return out;
}

/// (1/alpha!) d_xi^alpha A  times  D_x^alpha B, with D_x = -i d_x.
inline JetSlice leibniz_term(const JetSlice& A, const JetSlice& B, const std::array<int, 2>& alpha, int d) {
  JetSlice da = A, db = B;
  double fact = 1;
  int total = 0;
  for (int i = 0; i < d; ++i)
    for (int r = 0; r < alpha[i]; ++r) {
      da = da.partial(d + i);
      db = db.partial(i);
      fact *= (r + 1);
      ++total;
    }
  return da * db * (std::pow(cplx(0, -1), total) / fact);
}

}  // namespace detail

/// Leibniz product a#b regrouped by order down to -K.
inline SymbolExpansion leibniz_product(const SymbolExpansion& A, const SymbolExpansion& B, int K, int dim) {
  require(int(A.size()) > K && int(B.size()) > K, "factorization", "expansion shorter than the requested order");
  SymbolExpansion C;
  for (int k = 0; k <= K; ++k) {
    JetSlice s;
    bool first = true;
    for (int i = 0; i <= k; ++i)
      for (int l = 0; l + i <= k; ++l)
        for (const auto& alpha : detail::multi_indices(dim, k - i - l)) {
          JetSlice t = detail::leibniz_term(A[i], B[l], alpha, dim);
          if (first) {
            s = t;
            first = false;
          } else {
            s += t;
          }
        }
    C.push_back(std::move(s));
  }
  return C;
}

/// Factor expansion: q+ terms, m terms with m = s0 q-, and q- = m / s0.
struct FactorExpansion {
  SliceContext ctx;
  int K = 0;
  Jet s0;                      // jet in x only
  SymbolExpansion q;           // normalized symbol terms
  SymbolExpansion q_plus;
  SymbolExpansion m;           // s0 q-
  SymbolExpansion q_minus;
};

/// One recursion step: solves m_k/m_0 + q_k^+/q_0^+ = R_k and returns (q_k^+, m_k).
/// R_k collects q_k minus every Leibniz contribution of order -k from lower terms.
inline std::pair<JetSlice, JetSlice> lower_order_step(const SymbolExpansion& q, const SymbolExpansion& q_plus,
                                                      const SymbolExpansion& m, int k, int dim) {
  require(int(q.size()) > k && int(q_plus.size()) >= k && int(m.size()) >= k, "factorization",
          "lower terms must be computed first");
  JetSlice rhs = q[k];
  for (int i = 0; i <= k; ++i)
    for (int l = 0; l + i <= k; ++l)
      for (const auto& alpha : detail::multi_indices(dim, k - i - l)) {
        bool top = (k - i - l == 0) && ((i == k && l == 0) || (i == 0 && l == k));
        if (top) continue;
        rhs -= detail::leibniz_term(m[i], q_plus[l], alpha, dim);
      }
  JetSlice ratio = rhs / q[0];
  return {q_plus[0] * project(ratio, Side::plus), m[0] * project(ratio, Side::minus)};
}

/// Factor the normalized symbol and its lower-order terms down to order -K.
inline FactorExpansion factor_expansion(const SliceContext& ctx, int K, double theta = pi) {
  require(K >= 0 && K <= ctx.jet_order, "factorization", "jet order must cover the recursion depth");
  FactorExpansion fe;
  fe.ctx = ctx;
  fe.K = K;
  fe.q = normalized_expansion(ctx, K);
  const int d = ctx.sym.dim();
  // s0(x) = q_0(x, 0, 1): x-jets with constant frequency
  {
    auto [xs, xis] = ctx.seeds(1.0);
    for (int i = 0; i < d; ++i) xis[i] = Jet::constant(i + 1 == d ? 1.0 : 0.0, ctx.nvars(), ctx.jet_order);
    fe.s0 = ctx.sym.eval_term_jet(0, xs, xis);
  }
  const JetSlice& q0 = fe.q[0];
  detail::check_slice_for_factorization(q0.value_slice(DecayClass::zero), theta, FactorizeOptions{});
  const double cut = detail::normalized_cut(theta, fe.s0.value());
  JetSlice psi = q0.map([&](const Jet& v) {
    Jet w = v / fe.s0;
    Jet l = log(w);
    l[0] = log_with_cut(w.value(), cut);
    return l;
  });
  JetSlice psi_plus = project(psi, Side::plus), psi_minus = project(psi, Side::minus);
  fe.q_plus.push_back(psi_plus.map([](const Jet& v) { return exp(v); }));
  fe.m.push_back(psi_minus.map([&](const Jet& v) { return exp(v) * fe.s0; }));
  for (int k = 1; k <= K; ++k) {
    auto [qp, mk] = lower_order_step(fe.q, fe.q_plus, fe.m, k, d);
    fe.q_plus.push_back(std::move(qp));
    fe.m.push_back(std::move(mk));
  }
  for (const auto& mk : fe.m) fe.q_minus.push_back(mk.map([&](const Jet& v) { return v / fe.s0; }));
  return fe;
}

/// Right parametrix of the plus factor: q+ # q~ = 1 modulo order -K-1.
inline SymbolExpansion parametrix_plus(const SymbolExpansion& q_plus, int K, int dim) {
  require(int(q_plus.size()) > K, "factorization", "plus expansion shorter than K");
  const JetSlice& p0 = q_plus[0];
  JetSlice zero = p0 * 0.0;
  SymbolExpansion inv0{p0.map([](const Jet& v) { return 1.0 / v; })};
  for (int k = 1; k <= K; ++k) inv0.push_back(zero);
  // r = q+ # (1/q0+) - 1, with r_0 = 0
  SymbolExpansion r = leibniz_product(q_plus, inv0, K, dim);
  r[0] = zero;
  // S = 1 - r + r#r - ... through order -K
  SymbolExpansion one{p0.map([](const Jet& v) { return Jet::constant(1.0, v.nvars(), v.order()); })};
  for (int k = 1; k <= K; ++k) one.push_back(zero);
  SymbolExpansion S = one, power = one;
  for (int j = 1; j <= K; ++j) {
    power = leibniz_product(power, r, K, dim);
    for (int k = 0; k <= K; ++k) S[k] += power[k] * ((j % 2) ? -1.0 : 1.0);
  }
  return leibniz_product(inv0, S, K, dim);
}

/// Sup over nodes of each order term of q+ # q~ - 1 (right) and q~ # q+ - 1 (left).
struct ParametrixCheck {
  std::vector<double> right, left;
  double worst() const {
    double w = 0;
    for (double v : right) w = std::max(w, v);
    for (double v : left) w = std::max(w, v);
    return w;
  }
};

inline ParametrixCheck check_parametrix(const SymbolExpansion& q_plus, const SymbolExpansion& q_tilde, int K, int dim) {
  ParametrixCheck c;
  auto R = leibniz_product(q_plus, q_tilde, K, dim);
  auto L = leibniz_product(q_tilde, q_plus, K, dim);
  for (int k = 0; k <= K; ++k) {
    double off = (k == 0) ? 1.0 : 0.0;
    double rr = 0, ll = 0;
    for (std::size_t i = 0; i < R[k].size(); ++i) {
      rr = std::max(rr, std::abs(R[k].values[i].value() - off));
      ll = std::max(ll, std::abs(L[k].values[i].value() - off));
    }
    c.right.push_back(rr);
    c.left.push_back(ll);
  }
  return c;
}

/// sup over the slice of |s0^{-1} (q - m^(K) # q+^(K))| where both factors are truncated
/// after order -K and their Leibniz product keeps |alpha| <= K+1.
inline double slice_factorization_residual(const SliceContext& base, int K, double theta = pi) {
  SliceContext ctx = base;
  ctx.jet_order = std::min(Jet::kMaxOrder, 2 * K + 1);
  FactorExpansion fe = factor_expansion(ctx, K, theta);
  const int d = ctx.sym.dim();
  // full normalized symbol with every stored term
  int top = 0;
  for (std::size_t t = 0; t < ctx.sym.term_count(); ++t) top = std::max(top, ctx.sym.term(t).index);
  SliceContext plain = ctx;
  plain.jet_order = 0;
  SymbolExpansion full = normalized_expansion(plain, top);
  FreqGrid g = ctx.grid();
  std::vector<cplx> diff(g.n, 0.0);
  for (auto& term : full)
    for (std::size_t k = 0; k < g.n; ++k) diff[k] += term.values[k].value();
  for (int i = 0; i <= K; ++i)
    for (int l = 0; l <= K; ++l)
      for (int deg = 0; deg <= K + 1; ++deg)
        for (const auto& alpha : detail::multi_indices(d, deg)) {
          if (deg > ctx.jet_order - std::max(i, l)) continue;
          JetSlice t = detail::leibniz_term(fe.m[i], fe.q_plus[l], alpha, d);
          for (std::size_t k = 0; k < g.n; ++k) diff[k] -= t.values[k].value();
        }
  double res = 0;
  for (cplx v : diff) res = std::max(res, std::abs(v));
  return res / std::abs(fe.s0.value());
}

struct ResidualFit {
  std::vector<double> xi_prime_norm;  // <xi'>
  std::vector<double> residual;
  double exponent = 0.0;              // fitted power of <xi'>; -inf when every residual is below the floor
  bool at_floor = false;
};

/// Least-squares slope of log(residual) against log(<xi'>), with the floor rule.
inline ResidualFit fit_decay(std::vector<double> bracket, std::vector<double> residual, double floor = 1e-11) {
  ResidualFit f{std::move(bracket), std::move(residual)};
  bool all_small = true;
  for (double r : f.residual) all_small = all_small && r <= floor;
  if (all_small) {
    f.at_floor = true;
    f.exponent = -std::numeric_limits<double>::infinity();
    return f;
  }
  const std::size_t n = f.residual.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(f.xi_prime_norm[i]), y = std::log(std::max(f.residual[i], 1e-300));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return f;
}

/// Residual of the order -K factorization on a family of xi' slices, with the fitted decay.
inline ResidualFit factorization_residual(const Symbol& sym, const std::vector<double>& x,
                                          const std::vector<std::vector<double>>& xi_primes, int K,
                                          std::size_t n = 4096, double theta = pi) {
  std::vector<double> bracket, res;
  for (const auto& xp : xi_primes) {
    SliceContext ctx{sym, x, xp, n, K};
    double s = 1;
    for (double v : xp) s += v * v;
    bracket.push_back(std::sqrt(s));
    res.push_back(slice_factorization_residual(ctx, K, theta));
  }
  return fit_decay(std::move(bracket), std::move(res));
}

}  // namespace wh
