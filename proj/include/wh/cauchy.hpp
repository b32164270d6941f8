#pragma once

// Cauchy projections h+ / h- on frequency slices.
//
// A slice is sampled at the nodes xi_j = c tan(theta_j / 2), theta_j = -pi + 2 pi (j + 1/2) / N,
// which are the images of equispaced points on the unit circle under the Cayley map
// z = (xi - ic) / (xi + ic). In that variable a decaying slice is
//   f(xi) = (xi + ic)^{-1} sum_m a_m z^m,   m in [-N/2, N/2),
// and the terms with m < 0 are exactly the functions holomorphic in the lower half-plane
// (transforms of functions supported in x >= 0). The split is therefore exact on the grid,
// and the coefficients follow from one FFT.

#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace wh {

/// H_-1: the slice tends to 0 at infinity. H_0: it tends to a finite limit.
enum class DecayClass { minus1, zero };

enum class Side { plus, minus };

/// Sample layout for one frequency slice: N nodes and the Cayley scale c.
struct FreqGrid {
  std::size_t n = 4096;
  double scale = 1.0;

  void validate() const {
    require(n >= 64 && is_power_of_two(n), "grid", "frequency sample count must be a power of two >= 64");
    require(scale > 0, "grid", "frequency scale must be positive");
  }
  double theta(std::size_t k) const { return -pi + 2 * pi * (k + 0.5) / double(n); }
  double node(std::size_t k) const { return scale * std::tan(0.5 * theta(k)); }
  std::vector<double> nodes() const {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = node(k);
    return v;
  }
  /// Quadrature weight of node k for integrals over the real line.
  double weight(std::size_t k) const {
    double s = 1.0 / std::cos(0.5 * theta(k));
    return pi / double(n) * scale * s * s;
  }
  bool operator==(const FreqGrid& o) const { return n == o.n && scale == o.scale; }
};

namespace detail {

inline Eigen::FFT<double>& fft_engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

/// Rational-basis coefficients from weighted samples g_j: a_m = (1/N) sum_j g_j z_j^{-m}.
inline std::vector<cplx> to_coefficients(const std::vector<cplx>& g) {
  const std::size_t n = g.size();
  std::vector<cplx> spectrum;
  fft_engine().fwd(spectrum, g);
  std::vector<cplx> a(n);
  for (std::size_t i = 0; i < n; ++i) {
    long m = long(i) - long(n / 2);
    std::size_t src = std::size_t((m + long(n)) % long(n));
    a[i] = spectrum[src] * std::polar(1.0 / double(n), -pi * double(m) / double(n));
  }
  return a;
}

/// Inverse of to_coefficients: g_j = sum_m a_m z_j^m.
inline std::vector<cplx> from_coefficients(const std::vector<cplx>& a) {
  const std::size_t n = a.size();
  std::vector<cplx> spectrum(n);
  for (std::size_t i = 0; i < n; ++i) {
    long m = long(i) - long(n / 2);
    std::size_t dst = std::size_t((m + long(n)) % long(n));
    spectrum[dst] = a[i] * std::polar(double(n), pi * double(m) / double(n));
  }
  std::vector<cplx> g;
  fft_engine().inv(g, spectrum);
  return g;
}

}  // namespace detail

/// Samples of one frequency slice on a FreqGrid.
class FreqSlice {
 public:
  FreqSlice() = default;
  FreqSlice(FreqGrid grid, std::vector<cplx> values, DecayClass decay)
      : grid_(grid), values_(std::move(values)), decay_(decay) {
    grid_.validate();
    require(values_.size() == grid_.n, "grid", "sample count does not match the grid");
  }

  template <class F>
  static FreqSlice sample(const FreqGrid& grid, F&& f, DecayClass decay) {
    std::vector<cplx> v(grid.n);
    for (std::size_t k = 0; k < grid.n; ++k) v[k] = f(grid.node(k));
    return FreqSlice(grid, std::move(v), decay);
  }

  const FreqGrid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }
  DecayClass decay() const { return decay_; }
  std::size_t size() const { return values_.size(); }
  cplx operator[](std::size_t k) const { return values_[k]; }
  double node(std::size_t k) const { return grid_.node(k); }

  /// Coefficients in the rational basis, index m + N/2. For H_-1 the basis is
  /// (xi+ic)^{-1} z^m; for H_0 it is z^m.
  std::vector<cplx> coefficients() const {
    if (decay_ == DecayClass::zero) return detail::to_coefficients(values_);
    return detail::to_coefficients(weighted());
  }

  static FreqSlice from_coefficients(const FreqGrid& grid, const std::vector<cplx>& a, DecayClass decay) {
    std::vector<cplx> g = detail::from_coefficients(a);
    if (decay == DecayClass::minus1)
      for (std::size_t k = 0; k < grid.n; ++k) g[k] /= cplx(grid.node(k), grid.scale);
    return FreqSlice(grid, std::move(g), decay);
  }

  /// Limit at xi -> +-infinity (z -> 1).
  cplx limit_at_infinity() const {
    if (decay_ == DecayClass::minus1) return 0.0;
    cplx s = 0.0;
    for (cplx b : coefficients()) s += b;
    return s;
  }

  /// Series evaluation at a real frequency.
  cplx eval(double xi) const;
  /// Plus part (m < 0 terms) at a point of the closed lower half-plane.
  cplx eval_plus(cplx zeta) const;
  /// Minus part (m >= 0 terms and the limit) at a point of the closed upper half-plane.
  cplx eval_minus(cplx zeta) const;

  FreqSlice& operator*=(const FreqSlice& o) {
    check(o);
    for (std::size_t k = 0; k < size(); ++k) values_[k] *= o.values_[k];
    if (o.decay_ == DecayClass::minus1) decay_ = DecayClass::minus1;
    return *this;
  }
  FreqSlice& operator+=(const FreqSlice& o) {
    check(o);
    for (std::size_t k = 0; k < size(); ++k) values_[k] += o.values_[k];
    if (o.decay_ == DecayClass::zero) decay_ = DecayClass::zero;
    return *this;
  }
  FreqSlice& operator-=(const FreqSlice& o) {
    check(o);
    for (std::size_t k = 0; k < size(); ++k) values_[k] -= o.values_[k];
    if (o.decay_ == DecayClass::zero) decay_ = DecayClass::zero;
    return *this;
  }
  FreqSlice& operator*=(cplx s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  /// Adds a constant; the result tends to a nonzero limit unless the constant is 0.
  FreqSlice& operator+=(cplx s) {
    for (auto& v : values_) v += s;
    if (s != 0.0) decay_ = DecayClass::zero;
    return *this;
  }
  friend FreqSlice operator*(FreqSlice a, const FreqSlice& b) { return a *= b; }
  friend FreqSlice operator+(FreqSlice a, const FreqSlice& b) { return a += b; }
  friend FreqSlice operator-(FreqSlice a, const FreqSlice& b) { return a -= b; }
  friend FreqSlice operator*(FreqSlice a, cplx s) { return a *= s; }
  friend FreqSlice operator+(FreqSlice a, cplx s) { return a += s; }
  friend FreqSlice operator-(FreqSlice a, cplx s) { return a += -s; }

  /// Pointwise map of the samples into a slice of the declared class.
  template <class F>
  FreqSlice map(F&& f, DecayClass decay) const {
    std::vector<cplx> v(size());
    for (std::size_t k = 0; k < size(); ++k) v[k] = f(values_[k]);
    return FreqSlice(grid_, std::move(v), decay);
  }

  FreqSlice conjugate() const {
    return map([](cplx v) { return std::conj(v); }, decay_);
  }

  /// Sup of |value| over the nodes.
  double max_abs() const {
    double m = 0;
    for (cplx v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  void check(const FreqSlice& o) const { require(grid_ == o.grid_, "grid", "frequency grid mismatch"); }

  std::vector<cplx> weighted() const {
    std::vector<cplx> g(values_);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] *= cplx(grid_.node(k), grid_.scale);
    return g;
  }

  FreqGrid grid_;
  std::vector<cplx> values_;
  DecayClass decay_ = DecayClass::minus1;
};

/// Evaluates the rational series of a slice off the grid; coefficients are computed once.
class SeriesEvaluator {
 public:
  explicit SeriesEvaluator(const FreqSlice& f)
      : c_(f.grid().scale), decay_(f.decay()), a_(f.coefficients()), half_(f.size() / 2) {
    if (decay_ == DecayClass::zero)
      for (std::size_t i = 0; i < half_; ++i) plus_sum_ += a_[i];
  }

  /// sum over m < 0, Horner in 1/z; |1/z| <= 1 in the closed lower half-plane.
  cplx plus(cplx xi) const {
    require(xi.imag() <= 1e-14, "cauchy", "plus extension only exists for Im xi <= 0");
    const cplx w = (xi + I * c_) / (xi - I * c_);
    cplx s = 0.0;
    for (std::size_t n = half_; n >= 1; --n) s = (s + a_[half_ - n]) * w;
    if (decay_ == DecayClass::minus1) return s / (xi + I * c_);
    return s - plus_sum_;
  }

  /// sum over m >= 0, Horner in z; |z| <= 1 in the closed upper half-plane.
  cplx minus(cplx xi) const {
    require(xi.imag() >= -1e-14, "cauchy", "minus extension only exists for Im xi >= 0");
    const cplx z = (xi - I * c_) / (xi + I * c_);
    cplx s = 0.0;
    for (std::size_t m = a_.size() - half_; m-- > 0;) s = s * z + a_[half_ + m];
    if (decay_ == DecayClass::minus1) return s / (xi + I * c_);
    return s + plus_sum_;
  }

  cplx operator()(double xi) const { return plus(xi) + minus(xi); }

 private:
  double c_;
  DecayClass decay_;
  std::vector<cplx> a_;
  std::size_t half_;
  cplx plus_sum_ = 0.0;
};

inline cplx FreqSlice::eval(double xi) const { return SeriesEvaluator(*this)(xi); }
inline cplx FreqSlice::eval_plus(cplx zeta) const { return SeriesEvaluator(*this).plus(zeta); }
inline cplx FreqSlice::eval_minus(cplx zeta) const { return SeriesEvaluator(*this).minus(zeta); }

/// One-sided part of a slice. H_-1 input splits into two H_-1 pieces. For H_0 input the
/// plus part tends to 0 and the minus part carries the limit at infinity.
inline FreqSlice project(const FreqSlice& f, Side side) {
  auto a = f.coefficients();
  const std::size_t half = f.size() / 2;
  cplx moved = 0.0;  // H_0: constant removed from the plus basis functions z^m - 1
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool plus_mode = i < half;
    if (plus_mode && f.decay() == DecayClass::zero) moved += a[i];
    if (plus_mode != (side == Side::plus)) a[i] = 0.0;
  }
  FreqSlice out = FreqSlice::from_coefficients(f.grid(), a, f.decay());
  if (f.decay() == DecayClass::zero) {
    if (side == Side::plus) {
      out += -moved;
      return FreqSlice(out.grid(), out.values(), DecayClass::minus1);
    }
    out += moved;
  }
  return out;
}

inline FreqSlice h_plus(const FreqSlice& f) { return project(f, Side::plus); }
inline FreqSlice h_minus(const FreqSlice& f) { return project(f, Side::minus); }

/// Weighted L2 norm squared over the real line, exact for the rational basis.
inline double l2_norm_sq(const FreqSlice& f) {
  require(f.decay() == DecayClass::minus1, "cauchy", "L2 norm needs a decaying slice");
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += std::norm(f[k]) * f.grid().weight(k);
  return s;
}

/// Relative L2 mass of the inverse transform on the forbidden half-axis (x < 0 for plus).
/// For H_0 slices the limit at infinity is removed first.
inline double holomorphy_residual(const FreqSlice& f, Side side) {
  std::vector<cplx> a;
  if (f.decay() == DecayClass::zero) {
    FreqSlice g = f - f.limit_at_infinity();
    a = FreqSlice(g.grid(), g.values(), DecayClass::minus1).coefficients();
  } else {
    a = f.coefficients();
  }
  const std::size_t half = a.size() / 2;
  double total = 0, wrong = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double e = std::norm(a[i]);
    total += e;
    if ((i < half) != (side == Side::plus)) wrong += e;
  }
  return total > 0 ? std::sqrt(wrong / total) : 0.0;
}

/// Relative size of the highest |m| coefficients; small when the grid resolves the slice.
inline double resolution_tail(const FreqSlice& f) {
  auto a = f.coefficients();
  double peak = 0, tail = 0;
  const std::size_t n = a.size(), band = n / 16;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, std::abs(a[i]));
    if (i < band || i >= n - band) tail = std::max(tail, std::abs(a[i]));
  }
  return peak > 0 ? tail / peak : 0.0;
}

/// Spatial representation of a slice: Laguerre expansions on each half-axis,
///   u(x) = sum_k plus[k]  exp(-c x) L_k(2 c x)    for x > 0,
///   u(x) = sum_k minus[k] exp( c x) L_k(-2 c x)   for x < 0,
/// plus a Dirac mass at the origin for slices with a nonzero limit at infinity.
/// The sample at x = 0 belongs to the plus side.
class SpaceSlice {
 public:
  SpaceSlice() = default;
  SpaceSlice(FreqGrid grid, std::vector<cplx> plus, std::vector<cplx> minus, cplx delta = 0.0)
      : grid_(grid), plus_(std::move(plus)), minus_(std::move(minus)), delta_(delta) {
    grid_.validate();
    require(plus_.size() == grid_.n / 2 && minus_.size() == grid_.n / 2, "grid",
            "space slice needs N/2 coefficients per side");
  }

  const FreqGrid& grid() const { return grid_; }
  const std::vector<cplx>& plus() const { return plus_; }
  const std::vector<cplx>& minus() const { return minus_; }
  cplx delta() const { return delta_; }

  /// Function value off the origin; x = 0 returns the limit from the plus side.
  cplx eval(double x) const {
    const auto& coef = x >= 0 ? plus_ : minus_;
    std::vector<double> ell;
    special::laguerre_functions(int(coef.size()), 2 * grid_.scale * std::abs(x), ell);
    cplx s = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k) s += coef[k] * ell[k];
    return s;
  }

  /// Pointwise derivative on each open half-axis (the jump and Dirac parts at 0 are dropped).
  SpaceSlice derivative() const {
    const double c = grid_.scale;
    auto side = [c](const std::vector<cplx>& b, double sign) {
      std::vector<cplx> d(b.size());
      cplx suffix = 0.0;
      for (std::size_t j = b.size(); j-- > 0;) {
        d[j] = sign * (-c * b[j] - 2 * c * suffix);
        suffix += b[j];
      }
      return d;
    };
    return SpaceSlice(grid_, side(plus_, 1.0), side(minus_, -1.0));
  }

  /// L2 norm squared on one half-axis.
  double l2_norm_sq(Side side) const {
    double s = 0;
    for (cplx v : (side == Side::plus ? plus_ : minus_)) s += std::norm(v);
    return s / (2 * grid_.scale);
  }

  /// Expansion of a function given on the line, by composite Gauss-Legendre quadrature
  /// of its Laguerre coefficients on [-extent, extent].
  template <class F>
  static SpaceSlice from_function(const FreqGrid& grid, F&& u, double extent, int panels = 2048) {
    grid.validate();
    const std::size_t half = grid.n / 2;
    const double c = grid.scale;
    std::vector<cplx> plus(half), minus(half);
    const auto& gl = quad::gauss_legendre(16);
    std::vector<double> ell;
    const double width = extent / panels;
    for (int p = 0; p < panels; ++p)
      for (std::size_t q = 0; q < gl.size(); ++q) {
        double x = width * (p + 0.5 * (1 + gl.nodes[q]));
        double w = 0.5 * width * gl.weights[q] * 2 * c;
        special::laguerre_functions(int(half), 2 * c * x, ell);
        cplx up = u(x) * w, um = u(-x) * w;
        for (std::size_t k = 0; k < half; ++k) {
          plus[k] += up * ell[k];
          minus[k] += um * ell[k];
        }
      }
    return SpaceSlice(grid, std::move(plus), std::move(minus));
  }

 private:
  FreqGrid grid_;
  std::vector<cplx> plus_, minus_;
  cplx delta_ = 0.0;
};

/// Fourier transform (e^{-ix xi} convention) of a space slice.
inline FreqSlice fourier_slice(const SpaceSlice& u) {
  const std::size_t n = u.grid().n, half = n / 2;
  std::vector<cplx> a(n);
  // plus[k] multiplies F^{-1}[-i (xi+ic)^{-1} z^{-(k+1)}]; minus[k] multiplies F^{-1}[i (xi+ic)^{-1} z^k]
  for (std::size_t k = 0; k < half; ++k) {
    a[half - 1 - k] = -I * u.plus()[k];
    a[half + k] = I * u.minus()[k];
  }
  FreqSlice f = FreqSlice::from_coefficients(u.grid(), a, DecayClass::minus1);
  if (u.delta() != 0.0) f += u.delta();
  return f;
}

/// Inverse transform of a slice into its Laguerre representation.
inline SpaceSlice inverse_fourier_slice(const FreqSlice& f) {
  cplx limit = f.limit_at_infinity();
  FreqSlice g = f.decay() == DecayClass::zero ? f - limit : f;
  auto a = FreqSlice(g.grid(), g.values(), DecayClass::minus1).coefficients();
  const std::size_t half = f.size() / 2;
  std::vector<cplx> plus(half), minus(half);
  for (std::size_t k = 0; k < half; ++k) {
    plus[k] = I * a[half - 1 - k];
    minus[k] = -I * a[half + k];
  }
  return SpaceSlice(f.grid(), std::move(plus), std::move(minus), limit);
}

/// sup over x > 0 of |x^k D^kp u|, u the inverse transform of f, D = -i d/dx.
/// Dense sampling up to the decay length, then golden-section refinement of the best sample.
inline double seminorm_estimate(const FreqSlice& f, int k, int kp) {
  require(k >= 0 && k <= 4 && kp >= 0 && kp <= 4, "cauchy", "seminorm orders must lie in 0..4");
  SpaceSlice u = inverse_fourier_slice(f);
  for (int d = 0; d < kp; ++d) u = u.derivative();
  const double c = f.grid().scale;
  auto value = [&](double x) { return std::pow(x, k) * std::abs(u.eval(x)); };
  const double extent = 60.0 / c;
  const int samples = 1200;
  // quadratic spacing resolves the origin
  double best = -1, bx = 0;
  std::vector<double> xs(samples + 1);
  for (int i = 0; i <= samples; ++i) xs[i] = extent * std::pow(double(i) / samples, 2);
  int bi = 0;
  for (int i = 0; i <= samples; ++i) {
    double v = value(xs[i]);
    if (v > best) best = v, bx = xs[i], bi = i;
  }
  double lo = xs[std::max(bi - 1, 0)], hi = xs[std::min(bi + 1, samples)];
  const double g = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-13 * (1 + bx); ++it) {
    if (f1 > f2) {
      hi = x2, x2 = x1, f2 = f1, x1 = hi - g * (hi - lo), f1 = value(x1);
    } else {
      lo = x1, x1 = x2, f1 = f2, x2 = lo + g * (hi - lo), f2 = value(x2);
    }
  }
  return std::max({best, f1, f2});
}

}  // namespace wh
