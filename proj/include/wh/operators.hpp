#pragma once

// Discrete pseudodifferential operators on a uniform periodic grid over [-X, X).

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "cauchy.hpp"
#include "quadrature.hpp"
#include "special.hpp"
#include "symbols.hpp"

namespace wh {

struct SpaceGrid {
  std::size_t n = 4096;
  double half_width = 32.0;

  void validate() const {
    require(n >= 64 && is_power_of_two(n), "grid", "spatial sample count must be a power of two >= 64");
    require(half_width > 0, "grid", "window half-width must be positive");
  }
  double spacing() const { return 2 * half_width / double(n); }
  double x(std::size_t k) const { return -half_width + spacing() * double(k); }
  /// Frequency of FFT bin k (standard ordering); spacing pi / X.
  double frequency(std::size_t k) const {
    long m = k < n / 2 ? long(k) : long(k) - long(n);
    return pi / half_width * double(m);
  }
  /// Nearest grid index at or above x.
  std::size_t index_at_or_above(double t) const {
    double r = std::ceil((t + half_width) / spacing() - 1e-9);
    return std::size_t(std::clamp(r, 0.0, double(n - 1)));
  }
  bool operator==(const SpaceGrid& o) const { return n == o.n && half_width == o.half_width; }
};

/// Where a grid function is supposed to live. The sample at the split point belongs to the plus side.
struct Region {
  enum class Kind { plus, minus, interval };
  Kind kind = Kind::plus;
  double lo = 0.0, hi = 0.0;

  static Region plus(double at = 0.0) { return {Kind::plus, at, INFINITY}; }
  static Region minus(double at = 0.0) { return {Kind::minus, -INFINITY, at}; }
  static Region interval(double lo, double hi) { return {Kind::interval, lo, hi}; }

  bool contains(double x) const {
    switch (kind) {
      case Kind::plus: return x >= lo;
      case Kind::minus: return x < hi;
      default: return x >= lo && x <= hi;
    }
  }
};

class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(SpaceGrid grid, std::vector<cplx> values, std::optional<Region> support = std::nullopt)
      : grid_(grid), values_(std::move(values)), support_(support) {
    grid_.validate();
    require(values_.size() == grid_.n, "grid", "sample count does not match the grid");
  }

  /// Samples f on the grid; with a support region, samples outside it are zero.
  template <class F>
  static GridFunction sample(const SpaceGrid& grid, F&& f, std::optional<Region> support = std::nullopt) {
    std::vector<cplx> v(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k) {
      double x = grid.x(k);
      v[k] = (!support || support->contains(x)) ? cplx(f(x)) : cplx(0.0);
    }
    return GridFunction(grid, std::move(v), support);
  }

  const SpaceGrid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  const std::optional<Region>& support() const { return support_; }
  std::size_t size() const { return values_.size(); }
  cplx operator[](std::size_t k) const { return values_[k]; }
  double x(std::size_t k) const { return grid_.x(k); }

  GridFunction with_support(std::optional<Region> r) const {
    GridFunction g = *this;
    g.support_ = r;
    return g;
  }
  /// Zero outside the region and tag it.
  GridFunction restricted(const Region& r) const {
    GridFunction g = *this;
    for (std::size_t k = 0; k < size(); ++k)
      if (!r.contains(x(k))) g.values_[k] = 0.0;
    g.support_ = r;
    return g;
  }

  GridFunction& operator+=(const GridFunction& o) {
    check(o);
    for (std::size_t k = 0; k < size(); ++k) values_[k] += o.values_[k];
    if (!(support_ && o.support_ && same_region(*support_, *o.support_))) support_.reset();
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) { return *this += o * -1.0; }
  GridFunction& operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, cplx s) { return a *= s; }

  double max_abs() const {
    double m = 0;
    for (cplx v : values_) m = std::max(m, std::abs(v));
    return m;
  }
  /// Grid L2 norm, h sum |u|^2.
  double norm() const {
    double s = 0;
    for (cplx v : values_) s += std::norm(v);
    return std::sqrt(s * grid_.spacing());
  }

  void check(const GridFunction& o) const { require(grid_ == o.grid_, "grid", "grid mismatch"); }

 private:
  static bool same_region(const Region& a, const Region& b) {
    return a.kind == b.kind && a.lo == b.lo && a.hi == b.hi;
  }
  SpaceGrid grid_;
  std::vector<cplx> values_;
  std::optional<Region> support_;
};

/// h sum u conj(v).
inline cplx inner(const GridFunction& u, const GridFunction& v) {
  u.check(v);
  cplx s = 0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * std::conj(v[k]);
  return s * u.grid().spacing();
}

/// Relative L2 mass outside the region.
inline double support_leak(const GridFunction& u, const Region& r) {
  double out = 0, total = 0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    double e = std::norm(u[k]);
    total += e;
    if (!r.contains(u.x(k))) out += e;
  }
  return total > 0 ? std::sqrt(out / total) : 0.0;
}

namespace detail {

inline std::vector<cplx> fft_forward(const std::vector<cplx>& v) {
  std::vector<cplx> out;
  fft_engine().fwd(out, v);
  return out;
}
inline std::vector<cplx> fft_inverse(const std::vector<cplx>& v) {
  std::vector<cplx> out;
  fft_engine().inv(out, v);  // Eigen's inverse includes the 1/N factor
  return out;
}

/// Symbol of the second-order backward difference: (3 - 4 e^{-i xi h} + e^{-2 i xi h}) / (2h) = i xi + O(h^2).
inline cplx backward_difference_symbol(double xi, double h) {
  cplx w = std::polar(1.0, -xi * h);
  return (3.0 - 4.0 * w + w * w) / (2 * h);
}

inline int default_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(std::min(hw, 16u));
}

template <class F>
void parallel_for(std::size_t n, int threads, F&& body) {
  threads = std::max(1, std::min<int>(threads, int(n)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Multipliers

/// Op(m) for an x-independent symbol: transform, multiply, inverse transform.
template <class M>
GridFunction apply_multiplier(M&& m, const GridFunction& u) {
  const auto& g = u.grid();
  auto spectrum = detail::fft_forward(u.values());
  for (std::size_t k = 0; k < g.n; ++k) spectrum[k] *= cplx(m(g.frequency(k)));
  return GridFunction(g, detail::fft_inverse(spectrum));
}

/// Multiplier given by a frequency slice, evaluated through its rational expansion.
inline GridFunction apply_multiplier(const FreqSlice& f, const GridFunction& u) {
  SeriesEvaluator ev(f);
  return apply_multiplier([&](double xi) { return ev(xi); }, u);
}

/// Plus (or minus) operator with symbol m holomorphic in the lower (upper) half-plane.
/// The frequency is replaced by the second-order one-sided difference symbol, which
/// keeps xi in the closed half-plane of holomorphy and makes the discrete operator a
/// one-sided convolution: support in x >= c (x < c) is preserved up to wraparound.
template <class M>
GridFunction apply_one_sided(M&& m_ext, Side side, const GridFunction& u) {
  const auto& g = u.grid();
  const double h = g.spacing();
  auto spectrum = detail::fft_forward(u.values());
  for (std::size_t k = 0; k < g.n; ++k) {
    cplx zeta = -I * detail::backward_difference_symbol(g.frequency(k), h);
    if (side == Side::minus) zeta = std::conj(zeta);
    spectrum[k] *= cplx(m_ext(zeta));
  }
  return GridFunction(g, detail::fft_inverse(spectrum));
}

/// A discrete operator: a named map of grid functions with a support orientation.
struct DiscreteOp {
  enum class Orientation { none, plus, minus };
  std::string kind;
  Orientation orientation = Orientation::none;
  std::function<GridFunction(const GridFunction&)> fn;

  GridFunction operator()(const GridFunction& u) const { return fn(u); }

  static DiscreteOp identity() {
    return {"identity", Orientation::none, [](const GridFunction& u) { return u; }};
  }

  static DiscreteOp multiplier(std::function<cplx(double)> m, std::string name = "multiplier") {
    return {std::move(name), Orientation::none, [m](const GridFunction& u) { return apply_multiplier(m, u); }};
  }

  /// Symbol m_ext holomorphic in the half-plane of the given side. Support-tagged input uses the
  /// one-sided scheme and keeps plus (minus) tags; untagged smooth input uses exact frequencies.
  static DiscreteOp one_sided(std::function<cplx(cplx)> m_ext, Side side, std::string name) {
    Orientation o = side == Side::plus ? Orientation::plus : Orientation::minus;
    return {std::move(name), o, [m_ext, side](const GridFunction& u) {
              if (!u.support()) return apply_multiplier([&](double xi) { return m_ext(cplx(xi)); }, u);
              GridFunction r = apply_one_sided(m_ext, side, u);
              const auto k = u.support()->kind;
              bool keeps = (side == Side::plus && k == Region::Kind::plus) ||
                           (side == Side::minus && k == Region::Kind::minus);
              return keeps ? r.with_support(u.support()) : r;
            }};
  }

  /// (sigma +- i xi)^mu, principal branch.
  static DiscreteOp order_reduce(double mu, Side side, double sigma = 1.0) {
    require(sigma > 0, "operator", "order reduction needs sigma > 0");
    double s = side == Side::plus ? 1.0 : -1.0;
    return one_sided([mu, s, sigma](cplx z) { return std::pow(sigma + s * I * z, mu); }, side,
                     side == Side::plus ? "order_reduce_plus" : "order_reduce_minus");
  }

  /// Multiplier by a plus factor slice: its limit plus the plus part of the expansion.
  static DiscreteOp plus_factor(const FreqSlice& q) {
    auto ev = std::make_shared<SeriesEvaluator>(q);
    cplx limit = q.limit_at_infinity();
    return one_sided([ev, limit](cplx z) { return limit + ev->plus(z); }, Side::plus, "plus_factor");
  }
  /// Multiplier by a minus factor slice (its expansion's minus part carries the limit).
  static DiscreteOp minus_factor(const FreqSlice& q) {
    auto ev = std::make_shared<SeriesEvaluator>(q);
    return one_sided([ev](cplx z) { return ev->minus(z); }, Side::minus, "minus_factor");
  }

  /// Pointwise multiplication by c(x).
  static DiscreteOp pointwise(std::function<cplx(double)> c, std::string name = "pointwise") {
    return {std::move(name), Orientation::none, [c](const GridFunction& u) {
              GridFunction r = u;
              for (std::size_t k = 0; k < u.size(); ++k) r.values()[k] = c(u.x(k)) * u[k];
              return r;
            }};
  }

  /// Spectral derivative.
  static DiscreteOp derivative() {
    return {"derivative", Orientation::none,
            [](const GridFunction& u) { return apply_multiplier([](double xi) { return I * xi; }, u); }};
  }

  /// A then B applied as B(A(u)): compose(outer, inner).
  static DiscreteOp compose(DiscreteOp outer, DiscreteOp inner_op) {
    Orientation o = outer.orientation == inner_op.orientation ? outer.orientation : Orientation::none;
    return {outer.kind + "*" + inner_op.kind, o,
            [outer, inner_op](const GridFunction& u) { return outer(inner_op(u)); }};
  }
};

inline GridFunction order_reduce(const GridFunction& u, double mu, Side side, double sigma = 1.0) {
  return DiscreteOp::order_reduce(mu, side, sigma)(u);
}

/// r P e u: zero-extend u outside the region, apply P, restrict.
inline GridFunction truncate(const DiscreteOp& P, const GridFunction& u, const Region& region) {
  return P(u.restricted(region)).restricted(region);
}

/// Kohn-Nirenberg quantization on a 1D grid: (Pu)(x_j) = (1/N) sum_k e^{i x_j xi_k} p(x_j, xi_k) U_k.
/// x-independent symbols use the FFT unless force_quadrature is set.
inline GridFunction apply_xdep(const Symbol& sym, const GridFunction& u, int threads = 0,
                               bool force_quadrature = false) {
  require(sym.dim() == 1, "operator", "x-dependent quantization is one-dimensional");
  const auto& g = u.grid();
  require(g.n <= 8192, "operator", "quadrature cost is N^2; use N <= 8192");
  if (!sym.x_dependent() && !force_quadrature) {
    const double x0 = 0.0;
    return apply_multiplier([&](double xi) { return sym.eval(std::span(&x0, 1), std::span(&xi, 1)); }, u);
  }
  auto spectrum = detail::fft_forward(u.values());
  const std::size_t n = g.n;
  std::vector<cplx> roots(n);
  for (std::size_t k = 0; k < n; ++k) roots[k] = std::polar(1.0, 2 * pi * double(k) / double(n));
  std::vector<cplx> out(n);
  detail::parallel_for(n, detail::default_threads(threads), [&](std::size_t j) {
    const double x = g.x(j);
    cplx s = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double xi = g.frequency(k);
      s += roots[(j * k) % n] * sym.eval(std::span(&x, 1), std::span(&xi, 1)) * spectrum[k];
    }
    out[j] = s / double(n);
  });
  return GridFunction(g, std::move(out));
}

inline DiscreteOp xdep_op(const Symbol& sym, int threads = 0) {
  return {"xdep:" + sym.name(), DiscreteOp::Orientation::none,
          [sym, threads](const GridFunction& u) { return apply_xdep(sym, u, threads); }};
}

// ---------------------------------------------------------------------------
// Singular-integral oracle

struct PvOptions {
  std::vector<double> breakpoints;  // points where u is not smooth
  double support_radius = INFINITY; // u = 0 for |t| > support_radius
  double far_cutoff = 400.0;        // for unbounded support: integrate up to this distance
  double limit_at_infinity = 0.0;   // value u approaches far away
  int inner_nodes = 12;
  double tanh_sinh_step = 1.0 / 32;
};

/// c_{1,a} int_0^inf (2u(x) - u(x+y) - u(x-y)) y^{-1-2a} dy.
/// Near y = 0 the second-difference quotient is even and smooth; it is integrated in t = y^2
/// with the Gauss-Jacobi weight t^{-a}; beyond it the pieces between the distances to the
/// breakpoints use tanh-sinh, and the region where u(x +- y) = 0 is done in closed form.
template <class U>
double pv_fractional_laplacian_1d(U&& u, double a, double x, const PvOptions& opt = {}) {
  require(a > 0 && a < 1, "operator", "order parameter must lie in (0, 1)");
  const double ux = u(x);
  std::vector<double> cuts;
  for (double b : opt.breakpoints)
    if (std::abs(x - b) > 0) cuts.push_back(std::abs(x - b));
  double outer = std::isfinite(opt.support_radius) ? opt.support_radius + std::abs(x) : opt.far_cutoff;
  cuts.push_back(outer);
  std::sort(cuts.begin(), cuts.end());
  double inner = std::min({cuts.front() * 0.5, 1.0});
  for (double b : opt.breakpoints) require(std::abs(x - b) > 0, "operator", "evaluation point sits on a breakpoint");

  auto second = [&](double y) { return 2 * ux - u(x + y) - u(x - y); };
  // inner: second(y) / y^2 is even in y; with t = y^2 it is integrated against t^{-a}
  const double h = inner;
  const auto& gj = quad::cached_gauss_jacobi(opt.inner_nodes, 0.0, -a);
  double sum = 0;
  for (std::size_t k = 0; k < gj.size(); ++k) {
    double y = h * std::sqrt(0.5 * (1 + gj.nodes[k]));
    sum += gj.weights[k] * second(y) / (y * y);
  }
  sum *= 0.5 * std::pow(0.5 * h * h, 1 - a);
  quad::TanhSinh ts(opt.tanh_sinh_step);
  double lo = h;
  for (double c : cuts) {
    if (c <= lo) continue;
    sum += ts(lo, c, [&](double y) { return second(y) * std::pow(y, -1 - 2 * a); });
    lo = c;
  }
  // tail: u(x +- y) equals its limit beyond the last cut
  sum += 2 * (ux - opt.limit_at_infinity) * std::pow(lo, -2 * a) / (2 * a);
  return special::fraclap_constant(a) * sum;
}

// ---------------------------------------------------------------------------
// Commutator symbols

enum class CommutatorKind { partial, radial };

namespace detail {

/// New symbol whose term j is combine(jet of p_j at (x, xi) with first derivatives).
template <class Combine>
Symbol derived_symbol(const Symbol& sym, std::string name, bool x_dependent, Combine combine) {
  std::vector<HomogeneousTerm> terms;
  const int n = sym.dim();
  for (std::size_t k = 0; k < sym.term_count(); ++k) {
    HomogeneousTerm t;
    t.index = sym.term(k).index;
    t.degree = sym.term(k).degree;
    auto jet_fn = sym.term(k).jet;
    t.scalar = [jet_fn, n, combine](std::span<const cplx> x, std::span<const cplx> xi) {
      std::array<Jet, 3> xs, xis;
      for (int i = 0; i < n; ++i) {
        xs[i] = Jet::variable(x.empty() ? 0.0 : x[i].real(), i, 2 * n, 1);
        xis[i] = Jet::variable(xi[i].real(), n + i, 2 * n, 1);
      }
      Jet p = jet_fn(std::span<const Jet>(xs.data(), n), std::span<const Jet>(xis.data(), n));
      return combine(p, x, xi, n);
    };
    // derived symbols carry values only along jets
    t.jet = [f = t.scalar, n](std::span<const Jet> x, std::span<const Jet> xi) {
      std::array<cplx, 3> xv{}, xiv{};
      for (int i = 0; i < n; ++i) {
        xv[i] = x.empty() ? 0.0 : x[i].value();
        xiv[i] = xi[i].value();
      }
      return Jet::constant(f({xv.data(), std::size_t(n)}, {xiv.data(), std::size_t(n)}), xi[0].nvars(), 0);
    };
    terms.push_back(std::move(t));
  }
  return Symbol(std::move(name), n, sym.order(), std::move(terms), x_dependent, sym.excision());
}

inline std::array<int, 4> unit_index(int var) {
  std::array<int, 4> a{};
  a[var] = 1;
  return a;
}

}  // namespace detail

/// xi . grad_xi p (first) and x . grad_x p (second), termwise.
inline std::pair<Symbol, Symbol> radial_parts(const Symbol& sym) {
  Symbol p1 = detail::derived_symbol(sym, sym.name() + "_xi_grad", sym.x_dependent(),
                                     [](const Jet& p, auto, auto xi, int n) {
                                       cplx s = 0;
                                       for (int i = 0; i < n; ++i) s += xi[i] * p.derivative(detail::unit_index(n + i));
                                       return s;
                                     });
  Symbol p2 = detail::derived_symbol(sym, sym.name() + "_x_grad", sym.x_dependent(),
                                     [](const Jet& p, auto x, auto, int n) {
                                       cplx s = 0;
                                       for (int i = 0; i < n; ++i) s += x[i] * p.derivative(detail::unit_index(i));
                                       return s;
                                     });
  return {p1, p2};
}

/// Symbol of P d_j - d_j P (partial) or of [P, x . grad] (radial).
inline Symbol commutator_symbol(const Symbol& sym, CommutatorKind kind, int j = 0) {
  if (kind == CommutatorKind::partial) {
    require(j >= 0 && j < sym.dim(), "operator", "partial index out of range");
    return detail::derived_symbol(sym, sym.name() + "_commutator_partial", sym.x_dependent(),
                                  [j](const Jet& p, auto, auto, int) { return -p.derivative(detail::unit_index(j)); });
  }
  return detail::derived_symbol(sym, sym.name() + "_commutator_radial", sym.x_dependent(),
                                [](const Jet& p, auto x, auto xi, int n) {
                                  cplx s = 0;
                                  for (int i = 0; i < n; ++i)
                                    s += xi[i] * p.derivative(detail::unit_index(n + i)) -
                                         x[i] * p.derivative(detail::unit_index(i));
                                  return s;
                                });
}

// ---------------------------------------------------------------------------
// Even kernel operators applied pointwise by quadrature

/// A linear functional u -> sum_i weights[i] u(points[i]).
struct PointRule {
  std::vector<double> points;
  std::vector<double> weights;

  void add(double p, double w) {
    points.push_back(p);
    weights.push_back(w);
  }
  template <class U>
  cplx apply(U&& u) const {
    cplx s = 0;
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * cplx(u(points[i]));
    return s;
  }
};

/// Where the argument function of a kernel operator may be nonzero, and where it is not smooth.
struct KernelSupport {
  double lo = -1.0, hi = 1.0;
  std::vector<double> breakpoints{-1.0, 1.0};

  static KernelSupport interval(double lo = -1.0, double hi = 1.0) { return {lo, hi, {lo, hi}}; }
  /// [0, reach] with a kink at 0; beyond reach the function is treated as zero.
  static KernelSupport half_line(double reach = 60.0) { return {0.0, reach, {0.0}}; }
};

/// P = c(x) L with L even and x-independent:
///   L u(x) = mass u(x) + int_0^inf (2u(x) - u(x+z) - u(x-z)) nu(z) dz + int_0^inf (u(x+z) + u(x-z)) kappa(z) dz.
/// nu is given through nu(z) z^{1+2a}; kappa must be integrable at 0.
struct KernelOperator {
  std::string name;
  double a = 0.5;
  double mass = 0.0;
  std::function<double(double)> nu_scaled;
  std::function<double(double)> nu_tail;  // int_z^inf nu
  std::function<double(double)> kappa;
  std::function<double(double)> multiplier;  // symbol of L
  std::function<cplx(double)> coefficient = [](double) { return cplx(1.0); };
  std::function<cplx(double)> coefficient_derivative = [](double) { return cplx(0.0); };
  bool x_dependent = false;
  std::function<Symbol()> catalog_symbol;                 // matching catalog entry, excision aside
  std::shared_ptr<const KernelOperator> xi_radial_base;  // Op(xi d_xi m), same form
  int inner_nodes = 12;
  double tanh_sinh_step = 1.0 / 32;
  double inner_cap = 1.0;  // widest inner panel; small when nu z^{1+2a} is not analytic at 0

  static KernelOperator fractional_laplacian(double a) {
    require(a > 0 && a < 1, "operator", "order parameter must lie in (0, 1)");
    const double c = special::fraclap_constant(a);
    KernelOperator op;
    op.name = "fractional_laplacian";
    op.a = a;
    op.nu_scaled = [c](double) { return c; };
    op.nu_tail = [c, a](double z) { return c * std::pow(z, -2 * a) / (2 * a); };
    op.multiplier = [a](double xi) { return std::pow(xi * xi, a); };
    op.catalog_symbol = [a] { return catalog::fractional_laplacian(1, a); };
    KernelOperator radial = op;
    radial.name = "fractional_laplacian_xi_grad";
    radial.catalog_symbol = nullptr;
    op.xi_radial_base = std::make_shared<const KernelOperator>(radial.combined(0.0, radial, 2 * a));
    return op;
  }

  static KernelOperator helmholtz(double a, double m) {
    require(a > 0 && a < 1 && m > 0, "operator", "Helmholtz needs 0 < a < 1 and m > 0");
    KernelOperator op;
    op.name = "helmholtz";
    op.a = a;
    op.mass = std::pow(m, 2 * a);
    op.nu_scaled = [a, m](double z) { return special::helmholtz_levy_kernel(a, m, z) * std::pow(z, 1 + 2 * a); };
    op.nu_tail = [a, m](double z) {
      const double len = 80.0 / m;
      return quad::composite({}, z, z + len, [&](double t) { return special::helmholtz_levy_kernel(a, m, t); }, 64, 20);
    };
    op.multiplier = [a, m](double xi) { return std::pow(xi * xi + m * m, a); };
    op.catalog_symbol = [a, m] { return catalog::helmholtz(1, a, m, 3); };
    op.inner_cap = 0.1 / m;  // (mz)^{b} K_b(mz) carries a (mz)^{1+2a} term
    // xi d_xi (xi^2+m^2)^a = 2a (xi^2+m^2)^a - P3
    KernelOperator base = op;
    base.catalog_symbol = nullptr;
    op.xi_radial_base = std::make_shared<const KernelOperator>(base.combined(2 * a, helmholtz_p3(a, m), -1.0));
    return op;
  }

  /// P3 = 2a m^2 (-Delta+m^2)^{a-1}, a convolution with an integrable kernel.
  static KernelOperator helmholtz_p3(double a, double m) {
    KernelOperator op;
    op.name = "helmholtz_p3";
    op.a = a;
    const double c = 2 * a * m * m;
    op.kappa = [a, m, c](double z) { return c * special::bessel_potential_kernel(1 - a, m, z); };
    op.multiplier = [a, m, c](double xi) { return c * std::pow(xi * xi + m * m, a - 1); };
    return op;
  }

  /// (1 + sin(x)/2) (-Delta)^a, the one-dimensional variable-coefficient catalog entry.
  static KernelOperator variable_coefficient(double a) {
    KernelOperator op = fractional_laplacian(a);
    op.name = "variable_coefficient";
    op.coefficient = [](double x) { return cplx(1 + 0.5 * std::sin(x)); };
    op.coefficient_derivative = [](double x) { return cplx(0.5 * std::cos(x)); };
    op.x_dependent = true;
    op.catalog_symbol = [a] { return catalog::variable_coefficient(1, a); };
    return op;
  }

  /// e^{i phase} (-Delta)^a.
  static KernelOperator phase_rotated(double a, double phase) {
    KernelOperator op = fractional_laplacian(a);
    op.name = "phase_rotated";
    cplx c = std::polar(1.0, phase);
    op.coefficient = [c](double) { return c; };
    op.catalog_symbol = [a, phase] { return catalog::phase_rotated(1, a, phase); };
    return op;
  }

  /// alpha L + beta M for two x-independent parts of the same order; the coefficient of *this is kept.
  KernelOperator combined(double alpha, const KernelOperator& other, double beta) const {
    KernelOperator r = *this;
    r.mass = alpha * mass + beta * other.mass;
    auto scale = [](const std::function<double(double)>& f, double s) -> std::function<double(double)> {
      if (!f || s == 0.0) return nullptr;
      return [f, s](double z) { return s * f(z); };
    };
    auto sum = [](std::function<double(double)> f, std::function<double(double)> g) -> std::function<double(double)> {
      if (!f) return g;
      if (!g) return f;
      return [f, g](double z) { return f(z) + g(z); };
    };
    r.nu_scaled = sum(scale(nu_scaled, alpha), scale(other.nu_scaled, beta));
    r.nu_tail = sum(scale(nu_tail, alpha), scale(other.nu_tail, beta));
    r.kappa = sum(scale(kappa, alpha), scale(other.kappa, beta));
    r.multiplier = sum(scale(multiplier, alpha), scale(other.multiplier, beta));
    r.xi_radial_base = nullptr;
    r.catalog_symbol = nullptr;
    return r;
  }

  Symbol symbol() const {
    require(bool(catalog_symbol), "operator", "no catalog symbol for " + name);
    return catalog_symbol();
  }
  /// Principal symbol at (x, xi = 1).
  cplx s0(double x) const { return boundary_factor_s0(symbol(), {x}, {1.0}); }

  /// Quadrature rule for L at x.
  PointRule rule(double x, const KernelSupport& sup) const {
    std::vector<double> cuts;
    for (double b : sup.breakpoints) {
      require(std::abs(x - b) > 0, "operator", "evaluation point sits on a breakpoint");
      cuts.push_back(std::abs(x - b));
    }
    double reach = std::max(x - sup.lo, sup.hi - x);
    require(reach > 0, "operator", "empty support");
    cuts.push_back(reach);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    const double h = std::min(cuts.front() * 0.5, inner_cap);
    // long smooth stretches are split geometrically so the tanh-sinh pieces stay short
    std::vector<double> pieces;
    for (double lo = h; double c : cuts) {
      while (c > 4 * lo) pieces.push_back(lo *= 4);
      if (c > lo) pieces.push_back(c), lo = c;
    }

    PointRule r;
    if (mass != 0.0) r.add(x, mass);
    quad::TanhSinh ts(tanh_sinh_step);
    if (nu_scaled) {
      // inner: the second-difference quotient is even and analytic in y, so with t = y^2 it is
      // integrated against t^{-a} by Gauss-Jacobi; this also keeps nodes away from y = 0,
      // where rounding in u(x +- y) is amplified by y^{-2}
      const auto& gj = quad::cached_gauss_jacobi(inner_nodes, 0.0, -a);
      const double scale = 0.5 * std::pow(0.5 * h * h, 1 - a);
      double diag = 0;
      for (std::size_t k = 0; k < gj.size(); ++k) {
        double y = h * std::sqrt(0.5 * (1 + gj.nodes[k]));
        double w = gj.weights[k] * scale * nu_scaled(y) / (y * y);
        diag += 2 * w;
        r.add(x + y, -w);
        r.add(x - y, -w);
      }
      double lo = h;
      for (double c : pieces) {
        ts.visit(lo, c, [&](double y, double w) {
          double k = w * nu_scaled(y) * std::pow(y, -1 - 2 * a);
          diag += 2 * k;
          r.add(x + y, -k);
          r.add(x - y, -k);
        });
        lo = c;
      }
      diag += 2 * nu_tail(lo);
      r.add(x, diag);
    }
    if (kappa) {
      double lo = 0;
      for (double c : pieces) {
        ts.visit(lo, c, [&](double y, double w) {
          double k = w * kappa(y);
          r.add(x + y, k);
          r.add(x - y, k);
        });
        lo = c;
      }
    }
    return r;
  }

  template <class U>
  cplx apply_base(U&& u, double x, const KernelSupport& sup) const {
    return rule(x, sup).apply(u);
  }
  template <class U>
  cplx apply(U&& u, double x, const KernelSupport& sup) const {
    return coefficient(x) * apply_base(u, x, sup);
  }
  /// P* u = L(conj(c) u).
  template <class U>
  cplx apply_adjoint(U&& u, double x, const KernelSupport& sup) const {
    return apply_base([&](double y) { return std::conj(coefficient(y)) * cplx(u(y)); }, x, sup);
  }
  /// [P, d] u = -c'(x) L u.
  template <class U>
  cplx apply_commutator(U&& u, double x, const KernelSupport& sup) const {
    return -coefficient_derivative(x) * apply_base(u, x, sup);
  }
  /// P1 u = c(x) Op(xi d_xi m) u.
  template <class U>
  cplx apply_xi_radial(U&& u, double x, const KernelSupport& sup) const {
    require(bool(xi_radial_base), "operator", "no radial part for " + name);
    return coefficient(x) * xi_radial_base->apply_base(u, x, sup);
  }
  /// P2 u = x c'(x) L u.
  template <class U>
  cplx apply_x_radial(U&& u, double x, const KernelSupport& sup) const {
    return x * coefficient_derivative(x) * apply_base(u, x, sup);
  }
  /// [P, x d] u = P1 u - P2 u.
  template <class U>
  cplx apply_radial_commutator(U&& u, double x, const KernelSupport& sup) const {
    return apply_xi_radial(u, x, sup) - apply_x_radial(u, x, sup);
  }
};

}  // namespace wh
