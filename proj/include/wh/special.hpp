#pragma once

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "core.hpp"

namespace wh::special {

/// Jacobi polynomials P_0 .. P_K with parameters (alpha, beta) at x.
inline void jacobi_all(int K, double alpha, double beta, double x, std::vector<double>& out) {
  out.assign(K + 1, 0.0);
  out[0] = 1.0;
  if (K == 0) return;
  const double ab = alpha + beta;
  out[1] = 0.5 * ((ab + 2.0) * x + alpha - beta);
  for (int n = 2; n <= K; ++n) {
    const double s = 2.0 * n + ab;
    const double a1 = 2.0 * n * (n + ab) * (s - 2.0);
    const double a2 = (s - 1.0) * (alpha * alpha - beta * beta);
    const double a3 = (s - 2.0) * (s - 1.0) * s;
    const double a4 = 2.0 * (n + alpha - 1.0) * (n + beta - 1.0) * s;
    out[n] = ((a2 + a3 * x) * out[n - 1] - a4 * out[n - 2]) / a1;
  }
}

inline std::vector<double> jacobi_all(int K, double alpha, double beta, double x) {
  std::vector<double> out;
  jacobi_all(K, alpha, beta, x, out);
  return out;
}

/// Derivatives of P_0 .. P_K, from d/dx P_k = (k+alpha+beta+1)/2 P_{k-1}^{(alpha+1,beta+1)}.
inline void jacobi_derivative_all(int K, double alpha, double beta, double x, std::vector<double>& out) {
  std::vector<double> shifted;
  jacobi_all(std::max(K - 1, 0), alpha + 1, beta + 1, x, shifted);
  out.assign(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) out[k] = 0.5 * (k + alpha + beta + 1) * shifted[k - 1];
}

/// Squared norm of P_k^{(alpha,beta)} under the weight (1-x)^alpha (1+x)^beta.
inline double jacobi_norm_sq(int k, double alpha, double beta) {
  const double ab = alpha + beta;
  return std::exp((ab + 1) * std::log(2.0) + std::lgamma(k + alpha + 1) + std::lgamma(k + beta + 1) -
                  std::lgamma(k + 1.0) - std::lgamma(k + ab + 1)) /
         (2.0 * k + ab + 1);
}

/// (-Delta)^a maps (1-x^2)^a P_k^{(a,a)} to this multiple of P_k^{(a,a)} on (-1,1).
inline double fraclap_jacobi_eigenvalue(double a, int k) {
  return std::exp(std::lgamma(2 * a + k + 1) - std::lgamma(k + 1.0));
}

/// Normalizing constant of the one-dimensional singular-integral kernel c |y|^{-1-2a}.
inline double fraclap_constant(double a) {
  return std::pow(4.0, a) * std::tgamma(0.5 + a) / (std::sqrt(pi) * std::abs(std::tgamma(-a)));
}

/// Laguerre functions exp(-y/2) L_k(y), k < count, by the stable three-term recurrence.
/// Intermediate values are rescaled so large y and large k neither overflow nor underflow.
inline void laguerre_functions(int count, double y, std::vector<double>& out) {
  out.assign(count, 0.0);
  if (count == 0) return;
  // Run the recurrence for L_k itself with a running power-of-two scale, then apply exp(-y/2).
  double prev = 0.0, cur = 1.0;
  double log_scale = -0.5 * y;  // log of the factor multiplying cur/prev
  auto emit = [&](int k, double v) {
    double e = log_scale;
    out[k] = (v == 0.0) ? 0.0 : std::copysign(std::exp(std::log(std::abs(v)) + e), v);
  };
  emit(0, cur);
  for (int k = 0; k + 1 < count; ++k) {
    double next = ((2.0 * k + 1.0 - y) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    double m = std::max(std::abs(cur), std::abs(prev));
    if (m > 1e150 || (m < 1e-150 && m > 0)) {
      double s = std::log(m);
      prev /= m;
      cur /= m;
      log_scale += s;
    }
    emit(k + 1, cur);
  }
}

/// Fourier transform (e^{-ix xi} convention) of (1-x^2)_+^a P_k^{(a,a)}(x).
inline cplx weighted_jacobi_fourier(double a, int k, double xi) {
  using boost::math::cyl_bessel_j;
  const double lambda = a + 0.5;
  const double r = std::abs(xi);
  // P_k^{(a,a)} = ratio * Gegenbauer C_k^{(a+1/2)}
  const double log_ratio = std::lgamma(2 * a + 1) + std::lgamma(k + a + 1) - std::lgamma(a + 1) -
                           std::lgamma(k + 2 * a + 1);
  const double log_gegen = std::log(pi) + (1 - lambda) * std::log(2.0) + std::lgamma(2 * lambda + k) -
                           std::lgamma(k + 1.0) - std::lgamma(lambda);
  double bessel_part;
  if (r < 1e-6) {
    // r^{-lambda} J_{k+lambda}(r) by its leading series terms
    double nu = k + lambda;
    double lead = std::pow(0.5 * r, nu) / std::tgamma(nu + 1) * std::pow(r, -lambda);
    if (k == 0) lead = std::pow(0.5, lambda) / std::tgamma(lambda + 1) * (1 - r * r / (4 * (lambda + 1)));
    bessel_part = lead;
  } else {
    bessel_part = std::pow(r, -lambda) * cyl_bessel_j(k + lambda, r);
  }
  cplx phase = std::pow(cplx(0, -1), k);
  cplx v = std::exp(log_ratio + log_gegen) * bessel_part * phase;
  return xi < 0 ? std::conj(v) : v;
}

/// Kernel nu(z), z > 0, with (-Delta+m^2)^a u = m^{2a} u + int_0^inf (2u(x)-u(x+z)-u(x-z)) nu(z) dz.
inline double helmholtz_levy_kernel(double a, double m, double z) {
  using boost::math::cyl_bessel_k;
  const double b = 0.5 + a;
  return a / std::tgamma(1 - a) / std::sqrt(4 * pi) * 2.0 * std::pow(2 * m / z, b) * cyl_bessel_k(b, m * z);
}

/// Convolution kernel of (-Delta+m^2)^{-b}, 0 < b < 1, at |z| > 0.
inline double bessel_potential_kernel(double b, double m, double z) {
  using boost::math::cyl_bessel_k;
  z = std::abs(z);
  return std::pow(2.0, 0.5 - b) / (std::sqrt(pi) * std::tgamma(b)) * std::pow(z / m, b - 0.5) *
         cyl_bessel_k(b - 0.5, m * z);
}

}  // namespace wh::special
