#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "jet.hpp"

namespace wh {

/// Smooth cutoff: 0 for |xi| <= inner, 1 for |xi| >= outer, quintic smoothstep between.
struct ExcisionFunction {
  double inner = 0.5;
  double outer = 1.0;
  bool enabled = true;  // disabled for symbols that are smooth at xi = 0

  static ExcisionFunction none() { return {0.5, 1.0, false}; }

  double operator()(double r) const {
    if (!enabled) return 1.0;
    if (r <= inner) return 0.0;
    if (r >= outer) return 1.0;
    double s = (r - inner) / (outer - inner);
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
  }
};

using ScalarTermFn = std::function<cplx(std::span<const cplx>, std::span<const cplx>)>;
using JetTermFn = std::function<Jet(std::span<const Jet>, std::span<const Jet>)>;

/// One homogeneous term p_j(x, xi); degree = order - index.
struct HomogeneousTerm {
  int index = 0;
  double degree = 0.0;
  ScalarTermFn scalar;
  JetTermFn jet;
};

/// Builds a term from one generic callable usable with both cplx and Jet arguments.
template <class F>
HomogeneousTerm make_term(int index, double degree, F f) {
  HomogeneousTerm t;
  t.index = index;
  t.degree = degree;
  t.scalar = [f](std::span<const cplx> x, std::span<const cplx> xi) { return cplx(f(x, xi)); };
  t.jet = [f](std::span<const Jet> x, std::span<const Jet> xi) { return Jet(f(x, xi)); };
  return t;
}

template <class T>
T squared_norm(std::span<const T> v) {
  T s = v[0] * v[0];
  for (std::size_t i = 1; i < v.size(); ++i) s = s + v[i] * v[i];
  return s;
}

/// Classical symbol of real order 2a as a list of homogeneous terms.
class Symbol {
 public:
  Symbol() = default;
  Symbol(std::string name, int dim, double order, std::vector<HomogeneousTerm> terms, bool x_dependent,
         ExcisionFunction excision = {})
      : name_(std::move(name)),
        dim_(dim),
        order_(order),
        terms_(std::make_shared<const std::vector<HomogeneousTerm>>(std::move(terms))),
        x_dependent_(x_dependent),
        excision_(excision) {
    require(dim_ >= 1 && dim_ <= 3, "symbol", "dimension must be 1, 2 or 3");
    require(!terms_->empty(), "symbol", "a symbol needs at least its principal term");
    for (const auto& t : *terms_)
      require(std::abs(t.degree - (order_ - t.index)) < 1e-12, "symbol",
              "term degree must equal order minus its index");
  }

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double order() const { return order_; }
  double a() const { return 0.5 * order_; }
  bool x_dependent() const { return x_dependent_; }
  std::size_t term_count() const { return terms_->size(); }
  const HomogeneousTerm& term(std::size_t k) const { return terms_->at(k); }
  const ExcisionFunction& excision() const { return excision_; }

  /// Homogeneous term k at real (x, xi), no excision.
  cplx eval_term(std::size_t k, std::span<const double> x, std::span<const double> xi) const {
    std::array<cplx, 3> xc{}, xic{};
    for (int i = 0; i < dim_; ++i) {
      xc[i] = x.empty() ? 0.0 : x[i];
      xic[i] = xi[i];
    }
    return term(k).scalar(std::span<const cplx>(xc.data(), dim_), std::span<const cplx>(xic.data(), dim_));
  }

  Jet eval_term_jet(std::size_t k, std::span<const Jet> x, std::span<const Jet> xi) const {
    return term(k).jet(x, xi);
  }

  /// Sum of the first J terms times the excision factor; finite at xi = 0.
  cplx eval(std::span<const double> x, std::span<const double> xi, std::size_t J) const {
    require(J <= term_count(), "symbol", "requested more terms than stored");
    double r = 0.0;
    for (int i = 0; i < dim_; ++i) r += xi[i] * xi[i];
    double eta = excision_(std::sqrt(r));
    if (eta == 0.0) return 0.0;
    cplx s = 0.0;
    for (std::size_t k = 0; k < J; ++k) s += eval_term(k, x, xi);
    return eta * s;
  }
  cplx eval(std::span<const double> x, std::span<const double> xi) const { return eval(x, xi, term_count()); }

  /// Same symbol multiplied by a constant.
  Symbol scaled(cplx s, std::string name) const {
    std::vector<HomogeneousTerm> terms;
    for (const auto& t : *terms_) {
      HomogeneousTerm u = t;
      u.scalar = [s, f = t.scalar](std::span<const cplx> x, std::span<const cplx> xi) { return s * f(x, xi); };
      u.jet = [s, f = t.jet](std::span<const Jet> x, std::span<const Jet> xi) { return f(x, xi) * s; };
      terms.push_back(std::move(u));
    }
    return Symbol(std::move(name), dim_, order_, std::move(terms), x_dependent_, excision_);
  }

  /// Keeps only the principal term.
  Symbol principal() const {
    return Symbol(name_ + "_principal", dim_, order_, {term(0)}, x_dependent_, excision_);
  }

 private:
  std::string name_;
  int dim_ = 1;
  double order_ = 0.0;
  std::shared_ptr<const std::vector<HomogeneousTerm>> terms_;
  bool x_dependent_ = false;
  ExcisionFunction excision_;
};

inline double generalized_binomial(double a, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= (a - i) / (i + 1);
  return c;
}

namespace catalog {

/// |xi|^{2a}.
inline Symbol fractional_laplacian(int dim, double a) {
  auto f = [a](auto, auto xi) {
    using std::pow;
    return pow(squared_norm(xi), a);
  };
  return Symbol("fractional_laplacian", dim, 2 * a, {make_term(0, 2 * a, f)}, false);
}

/// Homogeneous expansion of (|xi|^2+m^2)^a: sum_k binom(a,k) m^{2k} |xi|^{2a-2k}, k < J.
/// Only the nonzero even-index terms are stored; term k carries index 2k.
inline Symbol helmholtz(int dim, double a, double m, int J) {
  require(J >= 1, "symbol", "Helmholtz expansion needs J >= 1");
  std::vector<HomogeneousTerm> terms;
  for (int k = 0; k < J; ++k) {
    double coef = generalized_binomial(a, k) * std::pow(m, 2.0 * k);
    double deg = 2 * a - 2 * k;
    terms.push_back(make_term(2 * k, deg, [coef, deg](auto, auto xi) {
      using std::pow;
      return pow(squared_norm(xi), 0.5 * deg) * coef;
    }));
  }
  return Symbol("helmholtz", dim, 2 * a, std::move(terms), false);
}

/// c(x) |xi|^{2a} with c(x) = 1 + sin(x_1)/2.
inline Symbol variable_coefficient(int dim, double a) {
  auto f = [a](auto x, auto xi) {
    using std::pow;
    using std::sin;
    return (sin(x[0]) * 0.5 + 1.0) * pow(squared_norm(xi), a);
  };
  return Symbol("variable_coefficient", dim, 2 * a, {make_term(0, 2 * a, f)}, true);
}

/// Normalization making the anisotropic quartic equal 1 on the sphere diagonal.
inline double anisotropic_normalization(int dim, double a, double cross) {
  double diag = 1.0 / dim + cross * (dim - 1) / (2.0 * dim);
  return std::pow(diag, -0.5 * a);
}

/// N (sum xi_i^4 + cross * sum_{i<j} xi_i^2 xi_j^2)^{a/2}; elliptic for cross > -2.
inline Symbol anisotropic(int dim, double a, double cross = 1.0) {
  require(cross > -2.0, "symbol", "anisotropic cross coefficient must exceed -2");
  double norm = anisotropic_normalization(dim, a, cross);
  auto f = [a, cross, norm](auto, auto xi) {
    using std::pow;
    auto q = xi[0] * xi[0] * xi[0] * xi[0];
    for (std::size_t i = 1; i < xi.size(); ++i) q = q + xi[i] * xi[i] * xi[i] * xi[i];
    for (std::size_t i = 0; i < xi.size(); ++i)
      for (std::size_t j = i + 1; j < xi.size(); ++j) q = q + xi[i] * xi[i] * xi[j] * xi[j] * cross;
    return pow(q, 0.5 * a) * norm;
  };
  return Symbol("anisotropic", dim, 2 * a, {make_term(0, 2 * a, f)}, false);
}

/// Anisotropic symbol whose cross coefficient 1 + sin(x_1 + x_n)/2 varies with x.
inline Symbol anisotropic_x(int dim, double a) {
  double norm = anisotropic_normalization(dim, a, 1.0);
  auto f = [a, norm](auto x, auto xi) {
    using std::pow;
    using std::sin;
    auto kappa = sin(x[0] + x[x.size() - 1]) * 0.5 + 1.0;
    auto q = xi[0] * xi[0] * xi[0] * xi[0];
    for (std::size_t i = 1; i < xi.size(); ++i) q = q + xi[i] * xi[i] * xi[i] * xi[i];
    for (std::size_t i = 0; i < xi.size(); ++i)
      for (std::size_t j = i + 1; j < xi.size(); ++j) q = q + kappa * xi[i] * xi[i] * xi[j] * xi[j];
    return pow(q, 0.5 * a) * norm;
  };
  return Symbol("anisotropic_x", dim, 2 * a, {make_term(0, 2 * a, f)}, true);
}

/// |xi|^{2a} + eps xi_1 |xi|^{2a-1}: breaks evenness.
inline Symbol odd_perturbation(int dim, double a, double eps) {
  auto f = [a, eps](auto, auto xi) {
    using std::pow;
    auto r2 = squared_norm(xi);
    return pow(r2, a) + xi[0] * pow(r2, a - 0.5) * eps;
  };
  return Symbol("odd_perturbation", dim, 2 * a, {make_term(0, 2 * a, f)}, false);
}

/// e^{i phase} |xi|^{2a}.
inline Symbol phase_rotated(int dim, double a, double phase) {
  return fractional_laplacian(dim, a).scaled(std::polar(1.0, phase), "phase_rotated");
}

/// Principal symbol sampled on the unit circle (dim 2) or the two points of S^0 (dim 1).
/// Columns: xi components, Re, Im. Rows may sit at any radius; values are rescaled
/// to the sphere by homogeneity of the given order. Derivatives are not available.
inline Symbol from_table(std::istream& in, int dim, double order, std::string name = "table") {
  require(dim == 1 || dim == 2, "symbol", "tabulated symbols support dimension 1 or 2");
  std::map<double, std::pair<cplx, int>> samples;  // key: angle (dim 2) or sign (dim 1)
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::array<double, 2> xi{};
    double re = 0, im = 0;
    for (int i = 0; i < dim; ++i) row >> xi[i];
    row >> re >> im;
    require(!row.fail(), "symbol", "malformed table row: " + line);
    double r = std::hypot(xi[0], xi[1]);
    require(r > 0, "symbol", "table rows need nonzero frequency");
    cplx v = cplx(re, im) / std::pow(r, order);
    double key = dim == 1 ? (xi[0] > 0 ? 1.0 : -1.0) : std::atan2(xi[1], xi[0]);
    auto& s = samples[key];
    s.first += v;
    s.second += 1;
  }
  require(samples.size() >= (dim == 1 ? 2u : 3u), "symbol", "table has too few directions");
  std::vector<double> keys;
  std::vector<cplx> vals;
  for (auto& [k, v] : samples) {
    keys.push_back(k);
    vals.push_back(v.first / double(v.second));
  }
  auto lookup = [keys, vals, dim](double x0, double x1) -> cplx {
    if (dim == 1) return x0 > 0 ? vals.back() : vals.front();
    double t = std::atan2(x1, x0);
    auto it = std::upper_bound(keys.begin(), keys.end(), t);
    std::size_t hi = (it == keys.end()) ? 0 : std::size_t(it - keys.begin());
    std::size_t lo = (hi == 0) ? keys.size() - 1 : hi - 1;
    double tl = keys[lo], th = keys[hi];
    if (th <= tl) th += 2 * pi;
    double tt = t < tl ? t + 2 * pi : t;
    double w = (tt - tl) / (th - tl);
    return (1 - w) * vals[lo] + w * vals[hi];
  };
  HomogeneousTerm t;
  t.index = 0;
  t.degree = order;
  t.scalar = [lookup, order](std::span<const cplx>, std::span<const cplx> xi) {
    double x0 = xi[0].real(), x1 = xi.size() > 1 ? xi[1].real() : 0.0;
    return lookup(x0, x1) * std::pow(std::hypot(x0, x1), order);
  };
  t.jet = [f = t.scalar](std::span<const Jet> x, std::span<const Jet> xi) {
    std::array<cplx, 2> xv{}, xiv{};
    for (std::size_t i = 0; i < xi.size(); ++i) {
      xv[i] = x.empty() ? 0.0 : x[i].value();
      xiv[i] = xi[i].value();
    }
    Jet r = Jet::constant(f({xv.data(), xi.size()}, {xiv.data(), xi.size()}), xi[0].nvars(), 0);
    return r;
  };
  return Symbol(std::move(name), dim, order, {t}, false);
}

}  // namespace catalog

// ---------------------------------------------------------------------------
// Sampling grids

/// Points on the unit sphere: {-1, 1} in dim 1, equispaced angles in dim 2, a Fibonacci lattice in dim 3.
inline std::vector<std::vector<double>> sphere_samples(int dim, int count) {
  std::vector<std::vector<double>> pts;
  if (dim == 1) return {{-1.0}, {1.0}};
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      double t = 2 * pi * (k + 0.5) / count;
      pts.push_back({std::cos(t), std::sin(t)});
    }
    return pts;
  }
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    double z = 1.0 - 2.0 * (k + 0.5) / count;
    double r = std::sqrt(1 - z * z);
    pts.push_back({r * std::cos(golden * k), r * std::sin(golden * k), z});
  }
  return pts;
}

/// Sphere samples scaled by each radius.
inline std::vector<std::vector<double>> shell_samples(int dim, int count, const std::vector<double>& radii) {
  std::vector<std::vector<double>> pts;
  for (double r : radii)
    for (auto p : sphere_samples(dim, count)) {
      for (auto& c : p) c *= r;
      pts.push_back(p);
    }
  return pts;
}

/// A few spatial points per coordinate for x-dependent checks.
inline std::vector<std::vector<double>> x_samples(const Symbol& sym) {
  if (!sym.x_dependent()) return {std::vector<double>(sym.dim(), 0.0)};
  std::vector<std::vector<double>> pts;
  for (double v : {-1.3, 0.0, 0.7, 2.1}) {
    std::vector<double> p(sym.dim(), 0.0);
    for (int i = 0; i < sym.dim(); ++i) p[i] = v * (1.0 + 0.3 * i);
    pts.push_back(p);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Structural checks

struct EvenReport {
  bool pass = true;
  std::vector<double> term_residual;  // per stored term
  int worst_term = -1;
  std::vector<double> worst_x, worst_xi;
};

/// max |p_j(x,-xi) - (-1)^j p_j(x,xi)| over the samples, per term.
inline EvenReport check_even(const Symbol& sym, const std::vector<std::vector<double>>& freq, double tol) {
  EvenReport rep;
  double worst = -1;
  for (std::size_t k = 0; k < sym.term_count(); ++k) {
    double sign = (sym.term(k).index % 2 == 0) ? 1.0 : -1.0;
    double res = 0.0;
    for (const auto& x : x_samples(sym))
      for (const auto& xi : freq) {
        std::vector<double> neg(xi);
        for (auto& c : neg) c = -c;
        double d = std::abs(sym.eval_term(k, x, neg) - sign * sym.eval_term(k, x, xi));
        if (d > res) res = d;
        if (d > worst) {
          worst = d;
          rep.worst_term = int(k);
          rep.worst_x = x;
          rep.worst_xi = xi;
        }
      }
    rep.term_residual.push_back(res);
    if (res > tol) rep.pass = false;
  }
  return rep;
}

struct TransmissionReport {
  bool pass = true;
  double residual = 0.0;
  std::string failing;  // "j=.. alpha=.. beta=.." of the worst multi-index
};

/// Checks the mu-transmission phase relation between xi = -nu and xi = nu for all
/// derivative orders |alpha| + |beta| <= 2 in (xi, x), using central differences.
inline TransmissionReport check_transmission(const Symbol& sym, double mu, const std::vector<double>& normal,
                                             double tol, const std::vector<double>& x0 = {}) {
  const int n = sym.dim();
  const double h = 1e-4;
  std::vector<double> xbase = x0.empty() ? std::vector<double>(n, 0.0) : x0;
  TransmissionReport rep;
  // derivative direction d in [0, 2n): d < n is xi_d, else x_{d-n}
  auto eval_shift = [&](std::size_t k, const std::vector<double>& xi, const std::vector<std::pair<int, double>>& steps) {
    std::vector<double> x = xbase, f = xi;
    for (auto [d, s] : steps) (d < n ? f[d] : x[d - n]) += s;
    return sym.eval_term(k, x, f);
  };
  auto deriv = [&](std::size_t k, const std::vector<double>& xi, int d1, int d2) -> cplx {
    if (d1 < 0) return eval_shift(k, xi, {});
    if (d2 < 0) return (eval_shift(k, xi, {{d1, h}}) - eval_shift(k, xi, {{d1, -h}})) / (2 * h);
    if (d1 == d2)
      return (eval_shift(k, xi, {{d1, h}}) - 2.0 * eval_shift(k, xi, {}) + eval_shift(k, xi, {{d1, -h}})) / (h * h);
    return (eval_shift(k, xi, {{d1, h}, {d2, h}}) - eval_shift(k, xi, {{d1, h}, {d2, -h}}) -
            eval_shift(k, xi, {{d1, -h}, {d2, h}}) + eval_shift(k, xi, {{d1, -h}, {d2, -h}})) /
           (4 * h * h);
  };
  std::vector<double> minus(normal);
  for (auto& c : minus) c = -c;
  for (std::size_t k = 0; k < sym.term_count(); ++k) {
    int j = sym.term(k).index;
    std::vector<std::pair<int, int>> orders{{-1, -1}};
    for (int d1 = 0; d1 < 2 * n; ++d1) {
      orders.push_back({d1, -1});
      for (int d2 = d1; d2 < 2 * n; ++d2) orders.push_back({d1, d2});
    }
    for (auto [d1, d2] : orders) {
        int alpha = (d1 >= 0 && d1 < n) + (d2 >= 0 && d2 < n);
        cplx phase = std::exp(I * pi * (sym.order() - 2 * mu - j - alpha));
        cplx at_plus = deriv(k, normal, d1, d2);
        cplx at_minus = deriv(k, minus, d1, d2);
        double res = std::abs(at_minus - phase * at_plus) / (1.0 + std::abs(at_plus));
        if (res > rep.residual) {
          rep.residual = res;
          std::ostringstream os;
          os << "j=" << j << " derivative directions (" << d1 << "," << d2 << ")";
          rep.failing = os.str();
        }
    }
  }
  rep.pass = rep.residual <= tol;
  if (rep.pass) rep.failing.clear();
  return rep;
}

struct EllipticityReport {
  bool pass = true;
  double margin = 0.0;       // min angular distance of arg p_0 from the ray
  double min_modulus = 0.0;  // min |p_0|
  std::vector<double> worst_x, worst_xi;
};

/// Angular distance between two directions, in [0, pi].
inline double angular_distance(double arg, double theta) { return std::abs(std::remainder(arg - theta, 2 * pi)); }

inline EllipticityReport check_ellipticity_ray(const Symbol& sym, double theta,
                                               const std::vector<std::vector<double>>& sphere, double tol = 1e-8) {
  EllipticityReport rep;
  rep.margin = pi;
  rep.min_modulus = INFINITY;
  double worst = INFINITY, max_modulus = 0.0;
  for (const auto& x : x_samples(sym))
    for (const auto& xi : sphere) {
      cplx v = sym.eval_term(0, x, xi);
      double d = std::abs(v) > 0 ? angular_distance(std::arg(v), theta) : 0.0;
      rep.margin = std::min(rep.margin, d);
      rep.min_modulus = std::min(rep.min_modulus, std::abs(v));
      max_modulus = std::max(max_modulus, std::abs(v));
      // a zero is the worst offender; otherwise rank by angle, which ignores positive scaling
      double score = std::abs(v) > 0 ? d : -1.0;
      if (score < worst) {
        worst = score;
        rep.worst_x = x;
        rep.worst_xi = xi;
      }
    }
  rep.pass = rep.margin > tol && rep.min_modulus > tol * max_modulus;
  return rep;
}

/// Principal symbol at a boundary point in the interior normal direction.
inline cplx boundary_factor_s0(const Symbol& sym, const std::vector<double>& x, const std::vector<double>& normal) {
  double len = 0.0;
  for (double c : normal) len += c * c;
  require(std::abs(len - 1.0) < 1e-12, "symbol", "normal must be a unit vector");
  return sym.eval_term(0, x, normal);
}

}  // namespace wh
