#pragma once

// Dense linear algebra over the rationals: reduced row echelon form, null
// spaces, and primitive integer scaling.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "periodlab/numeric.hpp"

namespace periodlab::exact {

using Row = std::vector<Rational>;
using Matrix = std::vector<Row>;

struct Echelon {
  Matrix rref;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

inline Echelon rref(Matrix a) {
  Echelon out;
  if (a.empty()) return out;
  const std::size_t rows = a.size();
  const std::size_t cols = a.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && a[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[r], a[piv]);
    Rational p = a[r][c];
    for (auto& x : a[r]) x /= p;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  a.resize(r);
  out.rref = std::move(a);
  return out;
}

inline std::size_t rank(const Matrix& a) { return rref(a).pivots.size(); }

/// Basis of {x : a x = 0}; one vector per free column, with that free
/// coordinate set to 1, in increasing free-column order.
inline std::vector<Row> nullspace(const Matrix& a, std::size_t cols) {
  Echelon e = rref(a);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  std::vector<Row> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Row v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rref[i][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Scales a rational vector by a positive rational so that its entries are
/// coprime integers.
inline std::vector<Integer> primitive(const Row& v) {
  Integer l(1);
  for (const auto& x : v) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(x));
  std::vector<Integer> out;
  out.reserve(v.size());
  Integer g(0);
  for (const auto& x : v) {
    Integer n = boost::multiprecision::numerator(x) * (l / boost::multiprecision::denominator(x));
    g = boost::multiprecision::gcd(g, n);
    out.push_back(n);
  }
  if (g > 1)
    for (auto& n : out) n /= g;
  return out;
}

/// Solves x * basis = target for a row vector x, where `basis` has full row
/// rank. Returns nullopt-like empty vector when target is outside the span.
inline std::vector<Rational> solve_left(const Matrix& basis, const Row& target) {
  const std::size_t k = basis.size();
  const std::size_t n = target.size();
  // Columns of the augmented system are the basis rows; transpose it.
  Matrix aug(n, Row(k + 1));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < k; ++i) aug[j][i] = basis[i][j];
    aug[j][k] = target[j];
  }
  Echelon e = rref(aug);
  if (!e.pivots.empty() && e.pivots.back() == k) return {};
  if (e.pivots.size() != k) return {};
  std::vector<Rational> x(k);
  for (std::size_t i = 0; i < k; ++i) x[e.pivots[i]] = e.rref[i][k];
  return x;
}

}  // namespace periodlab::exact
