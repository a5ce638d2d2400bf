#pragma once

// Truncated integer q-series: eta products, Eisenstein series, divisor sums.

#include <vector>

#include "periodlab/numeric.hpp"

namespace periodlab {

/// Coefficients c[0..n-1] of a power series in q, truncated at q^n.
using QSeries = std::vector<Integer>;

inline QSeries q_mul(const QSeries& a, const QSeries& b, std::size_t n) {
  QSeries c(n, Integer(0));
  for (std::size_t i = 0; i < a.size() && i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < n; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

/// prod_{m >= 1} (1 - q^(d m)) up to q^(n-1), by the pentagonal number theorem.
inline QSeries euler_product(std::size_t n, std::size_t d = 1) {
  QSeries c(n, Integer(0));
  for (long k = 0;; ++k) {
    bool any = false;
    for (long s : {k, -k}) {
      if (k == 0 && s == -k && k != 0) continue;
      const long e = s * (3 * s - 1) / 2;
      const std::size_t pos = static_cast<std::size_t>(e) * d;
      if (pos < n) {
        c[pos] += (k % 2 == 0) ? 1 : -1;
        any = true;
      }
      if (k == 0) break;
    }
    if (!any) break;
  }
  return c;
}

inline Integer divisor_sigma(long n, unsigned power) {
  Integer s(0);
  for (long d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    s += boost::multiprecision::pow(Integer(d), power);
    if (d * d != n) s += boost::multiprecision::pow(Integer(n / d), power);
  }
  return s;
}

/// E2(q^d) = 1 - 24 sum sigma_1(m) q^(d m).
inline QSeries eisenstein_e2(std::size_t n, std::size_t d = 1) {
  QSeries c(n, Integer(0));
  if (n > 0) c[0] = 1;
  for (std::size_t m = 1; m * d < n; ++m) c[m * d] = -24 * divisor_sigma(static_cast<long>(m), 1);
  return c;
}

/// E2(q) - d E2(q^d), a holomorphic weight-2 form on Gamma0(d).
inline QSeries e2_difference(std::size_t n, std::size_t d) {
  QSeries a = eisenstein_e2(n, 1);
  QSeries b = eisenstein_e2(n, d);
  for (std::size_t i = 0; i < n; ++i) a[i] -= static_cast<long>(d) * b[i];
  return a;
}

/// eta(t) eta(2t) eta(7t) eta(14t) = q prod (1-q^m)(1-q^2m)(1-q^7m)(1-q^14m).
inline QSeries eta_product_14(std::size_t n) {
  QSeries p = euler_product(n, 1);
  for (std::size_t d : {2, 7, 14}) p = q_mul(p, euler_product(n, d), n);
  QSeries out(n, Integer(0));
  for (std::size_t i = 0; i + 1 < n; ++i) out[i + 1] = p[i];
  return out;
}

}  // namespace periodlab
