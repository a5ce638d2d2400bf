#pragma once

// Dense univariate polynomials with ascending coefficients.

#include <algorithm>
#include <vector>

#include "periodlab/numeric.hpp"

namespace periodlab {

using IntPoly = std::vector<Integer>;
using RatPoly = std::vector<Rational>;

template <class P>
void trim(P& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

template <class P>
int degree(const P& p) {
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
    if (p[i] != 0) return i;
  return -1;
}

template <class P>
P poly_mul(const P& a, const P& b) {
  if (a.empty() || b.empty()) return {};
  P c(a.size() + b.size() - 1, typename P::value_type(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  trim(c);
  return c;
}

template <class P>
P poly_add(const P& a, const P& b) {
  P c(std::max(a.size(), b.size()), typename P::value_type(0));
  for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  trim(c);
  return c;
}

/// Horner evaluation of an integer or rational polynomial at a complex point.
template <class P>
Complex poly_eval(const P& p, const Complex& x) {
  Complex acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + Complex(Rational(*it));
  return acc;
}

template <class P>
Rational poly_eval_exact(const P& p, const Rational& x) {
  Rational acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + Rational(*it);
  return acc;
}

/// Coefficients of p(x0 + h) as a polynomial in h.
inline std::vector<Complex> taylor_shift(const IntPoly& p, const Complex& x0) {
  std::vector<Complex> c;
  c.reserve(p.size());
  for (const auto& a : p) c.emplace_back(Rational(a));
  const std::size_t n = c.size();
  // Repeated synthetic division by (x - x0).
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) c[j - 1] += x0 * c[j];
  return c;
}

inline Integer binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  Integer r(1);
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

}  // namespace periodlab
