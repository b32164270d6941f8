#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace wh {

/// Truncated multivariate Taylor expansion with complex coefficients.
///
/// The coefficient of (dv)^alpha is stored, so a derivative equals alpha!
/// times the coefficient. Coefficients are laid out in graded order, which
/// makes a lower-order jet a prefix of a higher-order one. order() is the
/// number of trustworthy derivative levels; it drops by one per partial().
class Jet {
 public:
  static constexpr int kMaxVars = 4;
  static constexpr int kMaxOrder = 3;
  static constexpr int kMaxTerms = 35;
  using Index = std::array<int, kMaxVars>;

  Jet() = default;

  static Jet constant(cplx v, int nvars, int order) {
    Jet j(nvars, order);
    j.c_[0] = v;
    return j;
  }
  static Jet variable(double v, int var, int nvars, int order) {
    Jet j = constant(v, nvars, order);
    require(var >= 0 && var < nvars, "jet", "variable index out of range");
    if (order >= 1) j.c_[1 + var] = 1.0;
    return j;
  }

  int nvars() const { return nv_; }
  int order() const { return ord_; }
  int size() const { return count(nv_, ord_); }
  cplx value() const { return c_[0]; }
  cplx& operator[](int k) { return c_[k]; }
  const cplx& operator[](int k) const { return c_[k]; }

  cplx coeff(const Index& alpha) const {
    int pos = position(nv_, alpha);
    return (pos >= 0 && pos < size()) ? c_[pos] : cplx{};
  }
  cplx derivative(const Index& alpha) const {
    double f = 1.0;
    for (int v = 0; v < kMaxVars; ++v)
      for (int k = 2; k <= alpha[v]; ++k) f *= k;
    int deg = 0;
    for (int v : alpha) deg += v;
    require(deg <= ord_, "jet", "derivative exceeds the valid order");
    return f * coeff(alpha);
  }

  /// Partial derivative in one variable; the valid order drops by one.
  Jet partial(int var) const {
    require(ord_ >= 1, "jet", "no derivative information left");
    Jet r(nv_, ord_ - 1);
    const auto& t = table(nv_);
    for (int k = 0; k < r.size(); ++k) {
      Index up = t.index[k];
      up[var] += 1;
      r.c_[k] = double(up[var]) * c_[position(nv_, up)];
    }
    return r;
  }

  Jet truncated(int order) const {
    Jet r(nv_, std::min(order, ord_));
    std::copy_n(c_.begin(), r.size(), r.c_.begin());
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (int k = 0; k < size(); ++k) r.c_[k] = -r.c_[k];
    return r;
  }
  Jet& operator+=(const Jet& o) { return merge(o, 1.0); }
  Jet& operator-=(const Jet& o) { return merge(o, -1.0); }
  Jet& operator+=(cplx s) { c_[0] += s; return *this; }
  Jet& operator-=(cplx s) { c_[0] -= s; return *this; }
  Jet& operator*=(cplx s) {
    for (int k = 0; k < size(); ++k) c_[k] *= s;
    return *this;
  }
  Jet& operator/=(cplx s) { return *this *= (1.0 / s); }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this * reciprocal(o); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    int nv = std::max(a.nv_, b.nv_);
    Jet r(nv, std::min(a.ord_, b.ord_));
    if (a.nv_ == 0 || b.nv_ == 0) {
      const Jet& s = a.nv_ == 0 ? a : b;
      const Jet& v = a.nv_ == 0 ? b : a;
      for (int k = 0; k < r.size(); ++k) r.c_[k] = s.c_[0] * v.c_[k];
      return r;
    }
    for (const auto& p : table(nv).products) {
      if (p.degree > r.ord_) break;
      r.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
    }
    return r;
  }

  /// Composition f(g) from the derivatives d[k] = f^(k)(g(0)), k <= order.
  static Jet compose(const Jet& g, const std::array<cplx, kMaxOrder + 1>& d) {
    Jet delta = g;
    delta.c_[0] = 0.0;
    Jet r = constant(d[0], g.nv_, g.ord_);
    Jet power = constant(1.0, g.nv_, g.ord_);
    double factorial = 1.0;
    for (int k = 1; k <= g.ord_ && g.nv_ > 0; ++k) {
      power = power * delta;
      factorial *= k;
      for (int i = 0; i < r.size(); ++i) r.c_[i] += d[k] / factorial * power.c_[i];
    }
    return r;
  }

  static int count(int nvars, int order) {
    // binomial(nvars + order, order)
    int c = 1;
    for (int k = 1; k <= order; ++k) c = c * (nvars + k) / k;
    return c;
  }

  static const Index& index_of(int nvars, int k) { return table(nvars).index[k]; }

 private:
  Jet(int nvars, int order) : nv_(nvars), ord_(order) {
    require(nvars >= 0 && nvars <= kMaxVars, "jet", "too many variables");
    require(order >= 0 && order <= kMaxOrder, "jet", "order too high");
    if (nvars == 0) ord_ = kMaxOrder;  // constants are exact to any order
  }

  struct Product {
    int lhs, rhs, out, degree;
  };
  struct Table {
    std::vector<Index> index;
    std::array<int, 256> lookup{};
    std::vector<Product> products;
  };

  static int code(const Index& a) { return a[0] + 4 * a[1] + 16 * a[2] + 64 * a[3]; }

  static Table build(int nv) {
    Table t;
    t.lookup.fill(-1);
    for (int deg = 0; deg <= kMaxOrder; ++deg) {
      std::vector<Index> level;
      Index a{};
      // enumerate all alpha with |alpha| = deg
      auto rec = [&](auto&& self, int var, int left) -> void {
        if (var == nv - 1 || nv == 0) {
          if (nv > 0) a[var] = left;
          if (nv > 0 || left == 0) level.push_back(a);
          return;
        }
        for (int k = left; k >= 0; --k) {
          a[var] = k;
          self(self, var + 1, left - k);
        }
        a[var] = 0;
      };
      rec(rec, 0, deg);
      for (auto& l : level) {
        t.lookup[code(l)] = int(t.index.size());
        t.index.push_back(l);
      }
    }
    for (int i = 0; i < int(t.index.size()); ++i)
      for (int j = 0; j < int(t.index.size()); ++j) {
        Index s{};
        int deg = 0;
        for (int v = 0; v < kMaxVars; ++v) {
          s[v] = t.index[i][v] + t.index[j][v];
          deg += s[v];
        }
        if (deg <= kMaxOrder) t.products.push_back({i, j, t.lookup[code(s)], deg});
      }
    std::stable_sort(t.products.begin(), t.products.end(),
                     [](const Product& x, const Product& y) { return x.degree < y.degree; });
    return t;
  }

  static const Table& table(int nv) {
    static const std::array<Table, kMaxVars + 1> tables = [] {
      std::array<Table, kMaxVars + 1> ts;
      for (int nv = 0; nv <= kMaxVars; ++nv) ts[nv] = build(nv);
      return ts;
    }();
    return tables[nv];
  }

  static int position(int nv, const Index& a) {
    for (int v = nv; v < kMaxVars; ++v)
      if (a[v] != 0) return -1;
    for (int v = 0; v < nv; ++v)
      if (a[v] > kMaxOrder) return -1;
    return table(nv).lookup[code(a)];
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    require(a.nv_ == b.nv_ || a.nv_ == 0 || b.nv_ == 0, "jet", "variable count mismatch");
  }

  Jet& merge(const Jet& o, double sign) {
    check_compatible(*this, o);
    if (nv_ == 0 && o.nv_ != 0) {
      Jet r = o * sign;
      r.c_[0] += c_[0];
      return *this = r;
    }
    ord_ = std::min(ord_, o.ord_);
    int n = o.nv_ == 0 ? 1 : size();
    for (int k = 0; k < n; ++k) c_[k] += sign * o.c_[k];
    for (int k = size(); k < kMaxTerms; ++k) c_[k] = 0.0;
    return *this;
  }

  friend Jet operator*(Jet a, cplx s) { return a *= s; }
  friend Jet operator*(cplx s, Jet a) { return a *= s; }

  static Jet reciprocal(const Jet& g) {
    cplx v = 1.0 / g.c_[0];
    return compose(g, {v, -v * v, 2.0 * v * v * v, -6.0 * v * v * v * v});
  }
  friend Jet inverse(const Jet& g) { return reciprocal(g); }

  int nv_ = 0;
  int ord_ = kMaxOrder;
  std::array<cplx, kMaxTerms> c_{};
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator/(Jet a, const Jet& b) { return a /= b; }
inline Jet operator+(Jet a, cplx s) { return a += s; }
inline Jet operator+(cplx s, Jet a) { return a += s; }
inline Jet operator-(Jet a, cplx s) { return a -= s; }
inline Jet operator-(cplx s, const Jet& a) { return -a + s; }
inline Jet operator/(Jet a, cplx s) { return a /= s; }
inline Jet operator/(cplx s, const Jet& a) { return inverse(a) * s; }
inline Jet operator+(Jet a, double s) { return a += cplx(s); }
inline Jet operator+(double s, Jet a) { return a += cplx(s); }
inline Jet operator-(Jet a, double s) { return a -= cplx(s); }
inline Jet operator-(double s, const Jet& a) { return -a + cplx(s); }
inline Jet operator*(Jet a, double s) { return a *= cplx(s); }
inline Jet operator*(double s, Jet a) { return a *= cplx(s); }
inline Jet operator/(Jet a, double s) { return a /= cplx(s); }
inline Jet operator/(double s, const Jet& a) { return inverse(a) * cplx(s); }

inline Jet exp(const Jet& g) {
  cplx e = std::exp(g.value());
  return Jet::compose(g, {e, e, e, e});
}

/// Principal logarithm; callers needing another branch add 2 pi i k to the value.
inline Jet log(const Jet& g) {
  cplx v = 1.0 / g.value();
  return Jet::compose(g, {std::log(g.value()), v, -v * v, 2.0 * v * v * v});
}

inline Jet pow(const Jet& g, double p) {
  cplx g0 = g.value();
  cplx f0 = std::pow(g0, p);
  cplx r = 1.0 / g0;
  return Jet::compose(g, {f0, p * f0 * r, p * (p - 1) * f0 * r * r,
                          p * (p - 1) * (p - 2) * f0 * r * r * r});
}

inline Jet sqrt(const Jet& g) { return pow(g, 0.5); }

inline Jet sin(const Jet& g) {
  cplx s = std::sin(g.value()), c = std::cos(g.value());
  return Jet::compose(g, {s, c, -s, -c});
}

inline Jet cos(const Jet& g) {
  cplx s = std::sin(g.value()), c = std::cos(g.value());
  return Jet::compose(g, {c, -s, -c, s});
}

inline Jet conj(const Jet& g) {
  Jet r = g;
  for (int k = 0; k < g.size(); ++k) r[k] = std::conj(g[k]);
  return r;
}

}  // namespace wh
