#pragma once

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <tuple>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "core.hpp"

namespace wh::quad {

/// Nodes and weights of a rule on [-1, 1] (or on the mapped interval).
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta by Golub-Welsch.
inline Rule gauss_jacobi(int n, double alpha, double beta) {
  require(n >= 1 && alpha > -1 && beta > -1, "quadrature", "invalid Gauss-Jacobi parameters");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int k = 0; k < n; ++k) {
    double s = 2.0 * k + ab;
    diag(k) = (k == 0) ? (beta - alpha) / (ab + 2.0) : (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    double s = 2.0 * k + ab;
    double b2 = (k == 1)
                    ? 4.0 * (1 + alpha) * (1 + beta) / ((2 + ab) * (2 + ab) * (3 + ab))
                    : 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    sub(k - 1) = std::sqrt(b2);
  }
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(alpha + 1) + std::lgamma(beta + 1) -
                              std::lgamma(ab + 2));
  if (n == 1) {
    r.nodes[0] = diag(0);
    r.weights[0] = mu0;
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
  for (int k = 0; k < n; ++k) {
    r.nodes[k] = es.eigenvalues()(k);
    double v = es.eigenvectors()(0, k);
    r.weights[k] = mu0 * v * v;
  }
  return r;
}

/// Cached Gauss-Jacobi rule; rules are immutable once built.
inline const Rule& cached_gauss_jacobi(int n, double alpha, double beta) {
  static std::mutex mutex;
  static std::map<std::tuple<int, double, double>, Rule> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_tuple(n, alpha, beta);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, gauss_jacobi(n, alpha, beta)).first;
  return it->second;
}

inline const Rule& gauss_legendre(int n) { return cached_gauss_jacobi(n, 0.0, 0.0); }

/// Sum over a rule mapped from [-1,1] onto [lo,hi]; f returns any vector-space value.
template <class F>
auto integrate(const Rule& r, double lo, double hi, F&& f) {
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  auto acc = f(mid + half * r.nodes[0]) * (r.weights[0] * half);
  for (std::size_t k = 1; k < r.size(); ++k) acc += f(mid + half * r.nodes[k]) * (r.weights[k] * half);
  return acc;
}

/// Integral of s^alpha F(s) over [0, length]: Jacobi rule on the first panel,
/// geometrically growing Legendre panels after it.
template <class F>
auto power_weighted(double alpha, double length, F&& f, double first_panel = 0.0, int nodes = 40) {
  double p = first_panel > 0 ? std::min(first_panel, length) : std::min(length, 0.5);
  const Rule& gj = cached_gauss_jacobi(nodes, 0.0, alpha);
  // on [0,p]: s = p (1+t)/2, s^alpha = (p/2)^alpha (1+t)^alpha
  const double scale = std::pow(0.5 * p, alpha) * 0.5 * p;
  auto acc = f(0.5 * p * (1.0 + gj.nodes[0])) * (gj.weights[0] * scale);
  for (std::size_t k = 1; k < gj.size(); ++k) acc += f(0.5 * p * (1.0 + gj.nodes[k])) * (gj.weights[k] * scale);
  double lo = p;
  const Rule& gl = gauss_legendre(nodes);
  while (lo < length * (1 - 1e-15)) {
    double hi = std::min(length, lo * 2.0);
    acc += integrate(gl, lo, hi, [&](double s) { return f(s) * std::pow(s, alpha); });
    lo = hi;
  }
  return acc;
}

/// Composite Gauss-Legendre over [lo,hi] split at the given interior points.
template <class F>
auto composite(std::vector<double> cuts, double lo, double hi, F&& f, int panels_per_piece = 4, int nodes = 24) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  const Rule& gl = gauss_legendre(nodes);
  decltype(f(lo) * 1.0) acc = f(lo) * 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double a = std::max(lo, cuts[i]), b = std::min(hi, cuts[i + 1]);
    if (!(b > a)) continue;
    double w = (b - a) / panels_per_piece;
    for (int p = 0; p < panels_per_piece; ++p) acc += integrate(gl, a + p * w, a + (p + 1) * w, f);
  }
  return acc;
}

/// Tanh-sinh rule on [-1,1]. Besides nodes it keeps the distance of each node
/// to its nearest endpoint, computed without cancellation.
struct TanhSinh {
  std::vector<double> nodes, weights, gaps;

  explicit TanhSinh(double step = 1.0 / 32, double tmax = 4.0) {
    for (double t = -tmax; t <= tmax + 1e-12; t += step) {
      double u = 0.5 * pi * std::sinh(t);
      double ch = std::cosh(u);
      double w = step * 0.5 * pi * std::cosh(t) / (ch * ch);
      double gap = 1.0 / (std::exp(std::abs(u)) * ch);  // 1 - |tanh u|
      if (w < 1e-300 || gap <= 0) continue;
      nodes.push_back(std::tanh(u));
      weights.push_back(w);
      gaps.push_back(gap);
    }
  }

  static const TanhSinh& standard() {
    static const TanhSinh rule;
    return rule;
  }

  /// Integral over [lo,hi]; f may be singular (integrably) at both ends.
  template <class F>
  auto operator()(double lo, double hi, F&& f) const {
    const double half = 0.5 * (hi - lo);
    auto point = [&](std::size_t k) {
      return nodes[k] < 0 ? lo + half * gaps[k] : hi - half * gaps[k];
    };
    auto acc = f(point(0)) * (weights[0] * half);
    for (std::size_t k = 1; k < nodes.size(); ++k) acc += f(point(k)) * (weights[k] * half);
    return acc;
  }

  /// Calls f(point, weight) for every node mapped to [lo,hi].
  template <class F>
  void visit(double lo, double hi, F&& f) const {
    const double half = 0.5 * (hi - lo);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      f(nodes[k] < 0 ? lo + half * gaps[k] : hi - half * gaps[k], weights[k] * half);
  }

  /// Same integral, but f(x, x - lo, hi - x) also receives both endpoint distances exactly.
  template <class F>
  auto with_distances(double lo, double hi, F&& f) const {
    const double half = 0.5 * (hi - lo);
    auto call = [&](std::size_t k) {
      double d = half * gaps[k];
      return nodes[k] < 0 ? f(lo + d, d, 2 * half - d) : f(hi - d, 2 * half - d, d);
    };
    auto acc = call(0) * (weights[0] * half);
    for (std::size_t k = 1; k < nodes.size(); ++k) acc += call(k) * (weights[k] * half);
    return acc;
  }
};

}  // namespace wh::quad
