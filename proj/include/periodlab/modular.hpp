#pragma once

// Modular forms of level 14: point counts on X0(14), Hecke expansion of
// prime coefficients, coefficient files, and the weight-4 newforms.

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "periodlab/exact_linalg.hpp"
#include "periodlab/qseries.hpp"

namespace periodlab {

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<long> primes_up_to(long n) {
  std::vector<long> out;
  if (n < 2) return out;
  std::vector<bool> comp(static_cast<std::size_t>(n) + 1, false);
  for (long i = 2; i <= n; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (long j = i * i; j <= n; j += i) comp[j] = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Elliptic curves.

/// y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
struct EllipticCurve {
  long a1, a2, a3, a4, a6;

  Integer discriminant() const {
    Integer b2 = Integer(a1) * a1 + 4 * Integer(a2);
    Integer b4 = 2 * Integer(a4) + Integer(a1) * a3;
    Integer b6 = Integer(a3) * a3 + 4 * Integer(a6);
    Integer b8 = Integer(a1) * a1 * a6 + 4 * Integer(a2) * a6 - Integer(a1) * a3 * a4 + Integer(a2) * a3 * a3 -
                 Integer(a4) * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  }
};

/// The curve 14a1, a model of X0(14).
inline EllipticCurve x0_14() { return {1, 0, 1, 4, -6}; }

struct PointCount {
  long ap;
  long points;  // projective points over F_p
  bool bad;     // p divides the discriminant
};

namespace detail {

inline long mod(long a, long p) {
  long r = a % p;
  return r < 0 ? r + p : r;
}

inline long pow_mod(long b, long e, long p) {
  long r = 1;
  b = mod(b, p);
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

}  // namespace detail

/// Counts points over F_p: for odd p each x contributes 1 + (D/p) with D the
/// discriminant of the quadratic in y; for p = 2 every (x, y) is tried.
inline PointCount ap_point_count(const EllipticCurve& e, long p) {
  if (!is_prime(p)) throw Error(ErrorKind::not_prime, std::to_string(p) + " is not prime");
  using detail::mod;
  long affine = 0;
  for (long x = 0; x < p; ++x) {
    const long b = mod(e.a1 * x + e.a3, p);
    const long c = mod(x * x % p * x + e.a2 * (x * x % p) + e.a4 * x + e.a6, p);  // y^2 + b y - c = 0
    if (p == 2) {
      for (long y = 0; y < 2; ++y)
        if (mod(y * y + b * y - c, 2) == 0) ++affine;
      continue;
    }
    const long d = mod(b * b + 4 * c, p);
    if (d == 0)
      affine += 1;
    else if (detail::pow_mod(d, (p - 1) / 2, p) == 1)
      affine += 2;
  }
  PointCount pc;
  pc.points = affine + 1;
  pc.ap = p + 1 - pc.points;
  pc.bad = e.discriminant() % p == 0;
  return pc;
}

// ---------------------------------------------------------------------------
// Modular forms given by prime coefficients.

struct ModularForm {
  std::string label;
  int weight = 0;
  long level = 0;
  std::map<long, Integer> ap;
  int eps = 0;  // functional-equation sign, 0 when unknown

  long max_prime() const { return ap.empty() ? 0 : ap.rbegin()->first; }
};

/// Checks a1 = 1 implicitly (a_n is built from primes) and |a_p| <= 2 p^((k-1)/2)
/// at good primes, compared exactly as a_p^2 <= 4 p^(k-1).
inline void check_deligne_bound(const ModularForm& f) {
  for (const auto& [p, a] : f.ap) {
    if (f.level % p == 0) continue;
    Integer bound = 4 * boost::multiprecision::pow(Integer(p), static_cast<unsigned>(f.weight - 1));
    if (a * a > bound)
      throw Error(ErrorKind::rejected_payload, "a_" + std::to_string(p) + " violates the Deligne bound");
  }
}

/// a_1..a_upto (index 0 holds 0) from the prime coefficients.
inline std::vector<Integer> expand_coefficients(const ModularForm& f, long upto) {
  std::vector<long> missing;
  for (long p : primes_up_to(upto))
    if (!f.ap.count(p)) missing.push_back(p);
  if (!missing.empty()) {
    std::ostringstream os;
    os << "missing a_p for primes:";
    for (std::size_t i = 0; i < missing.size() && i < 12; ++i) os << ' ' << missing[i];
    if (missing.size() > 12) os << " ... (" << missing.size() << " total)";
    throw Error(ErrorKind::gap, os.str());
  }
  std::vector<Integer> a(static_cast<std::size_t>(std::max(upto, 1L)) + 1, Integer(0));
  a[1] = 1;
  for (long p : primes_up_to(upto)) {
    const Integer& ap = f.ap.at(p);
    const bool bad = f.level % p == 0;
    const Integer pk = boost::multiprecision::pow(Integer(p), static_cast<unsigned>(f.weight - 1));
    Integer prev(1), cur = ap;
    for (long q = p; q <= upto; q *= p) {
      a[q] = cur;
      Integer next = bad ? Integer(ap * cur) : Integer(ap * cur - pk * prev);
      prev = cur;
      cur = next;
      if (q > upto / p) break;
    }
  }
  // Multiplicative extension over coprime prime-power factors.
  for (long n = 2; n <= upto; ++n) {
    long m = n, p = 2;
    while (p * p <= m && m % p != 0) ++p;
    if (p * p > m) continue;  // prime
    long q = 1;
    while (m % p == 0) {
      m /= p;
      q *= p;
    }
    if (m > 1) a[n] = a[q] * a[m];
  }
  return a;
}

/// 14.2.a.a from point counts on X0(14) for all primes <= upto.
inline ModularForm f2_from_point_counts(long upto) {
  ModularForm f;
  f.label = "14.2.a.a";
  f.weight = 2;
  f.level = 14;
  const EllipticCurve e = x0_14();
  for (long p : primes_up_to(upto)) f.ap[p] = ap_point_count(e, p).ap;
  return f;
}

/// q-coefficients of eta(t)eta(2t)eta(7t)eta(14t), compared with the point
/// count expansion; a mismatch is reported rather than trusted.
inline std::vector<Integer> eta_f2_crosscheck(long upto) {
  if (upto < 1) throw Error(ErrorKind::usage, "upto must be at least 1");
  QSeries eta = eta_product_14(static_cast<std::size_t>(upto) + 1);
  std::vector<Integer> counted = expand_coefficients(f2_from_point_counts(upto), upto);
  for (long n = 1; n <= upto; ++n)
    if (eta[n] != counted[n])
      throw Error(ErrorKind::crosscheck, "eta product and point counts disagree at n = " + std::to_string(n));
  return std::vector<Integer>(eta.begin(), eta.end());
}

// ---------------------------------------------------------------------------
// Coefficient files.

inline ModularForm parse_coefficients(std::istream& in) {
  ModularForm f;
  bool have_label = false, have_weight = false, have_level = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto hash = raw.find('#');
    std::istringstream ls(hash == std::string::npos ? raw : raw.substr(0, hash));
    std::string key;
    if (!(ls >> key)) continue;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + what);
    };
    if (key == "label") {
      if (!(ls >> f.label)) fail("missing label");
      have_label = true;
    } else if (key == "weight") {
      if (!(ls >> f.weight) || f.weight < 1) fail("bad weight");
      have_weight = true;
    } else if (key == "level") {
      if (!(ls >> f.level) || f.level < 1) fail("bad level");
      have_level = true;
    } else if (key == "a") {
      long n = 0;
      std::string v;
      if (!(ls >> n >> v)) fail("expected `a <n> <integer>`");
      Integer value;
      try {
        value = parse_integer(v);
      } catch (const std::exception&) {
        fail("bad integer '" + v + "'");
      }
      if (n == 1 && value != 1) throw Error(ErrorKind::rejected_payload, "a_1 must be 1");
      if (is_prime(n)) f.ap[n] = value;  // composite coefficients are always recomputed
    } else {
      fail("unknown key '" + key + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing text");
  }
  if (!have_label || !have_weight || !have_level) throw Error(ErrorKind::parse, "coefficient file needs label, weight and level");
  return f;
}

inline ModularForm parse_coefficients(const std::string& text) {
  std::istringstream in(text);
  return parse_coefficients(in);
}

inline ModularForm read_coefficient_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::not_found, "cannot open coefficient file " + file);
  return parse_coefficients(in);
}

inline std::string serialize_coefficients(const ModularForm& f) {
  std::ostringstream os;
  os << "label " << f.label << '\n' << "weight " << f.weight << '\n' << "level " << f.level << '\n';
  for (const auto& [p, a] : f.ap) os << "a " << p << ' ' << a << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Weight-4 newforms of level 14 by Hecke diagonalization.
//
// S4(Gamma0(14)) has dimension 4 and equals f2 * M2(Gamma0(14)), where M2 is
// spanned by f2 and E2(q) - d E2(q^d) for d = 2, 7, 14. The old space comes
// from the single newform of level 7 and is a 2-dimensional T3-eigenspace;
// the two 1-dimensional T3-eigenspaces are the newforms.

inline std::vector<QSeries> s4_level14_basis(std::size_t n) {
  QSeries f2 = eta_product_14(n);
  std::vector<QSeries> basis;
  basis.push_back(q_mul(f2, f2, n));
  for (std::size_t d : {2, 7, 14}) basis.push_back(q_mul(f2, e2_difference(n, d), n));
  return basis;
}

/// Newforms of weight 4 and level 14 with q-expansions through q^upto,
/// ordered by (a_3, a_5).
inline std::vector<std::vector<Integer>> weight4_level14_newforms(long upto) {
  const int k = 4;
  const std::size_t sturm = 8;
  const std::size_t n = std::max<std::size_t>(static_cast<std::size_t>(upto) + 1, 5 * sturm + 2);
  auto basis = s4_level14_basis(n);
  const std::size_t dim = basis.size();

  // Coordinates of a series against the basis from its first `sturm` coefficients.
  exact::Matrix rows(dim, exact::Row(sturm));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t m = 1; m <= sturm; ++m) rows[i][m - 1] = basis[i][m];
  auto coords = [&](const QSeries& g) {
    exact::Row target(sturm);
    for (std::size_t m = 1; m <= sturm; ++m) target[m - 1] = g[m];
    auto x = exact::solve_left(rows, target);
    if (x.empty()) throw Error(ErrorKind::inconsistency, "Hecke image left the cusp space");
    return x;
  };

  // Hecke operators for p = 3, 5: (T_p g)[m] = g[p m] + p^(k-1) g[m/p].
  auto hecke = [&](long p) {
    exact::Matrix t(dim);
    const long pk = static_cast<long>(std::pow(p, k - 1));
    for (std::size_t i = 0; i < dim; ++i) {
      QSeries tg(sturm + 1, Integer(0));
      for (std::size_t m = 1; m <= sturm; ++m) {
        tg[m] = basis[i][p * m];
        if (m % p == 0) tg[m] += pk * basis[i][m / p];
      }
      t[i] = coords(tg);
    }
    return t;
  };
  const exact::Matrix t3 = hecke(3), t5 = hecke(5);

  // Joint left eigenvectors c^T T3 = l3 c^T, c^T T5 = l5 c^T; the old space
  // is a 2-dimensional joint eigenspace and is skipped.
  std::vector<std::vector<Integer>> forms;
  auto bound = [&](long p) { return static_cast<long>(std::floor(2 * std::pow(double(p), (k - 1) / 2.0))); };
  for (long l3 = -bound(3); l3 <= bound(3); ++l3) {
    exact::Matrix a3(dim, exact::Row(dim));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) a3[i][j] = t3[j][i] - Rational(i == j ? l3 : 0);
    if (exact::rank(a3) == dim) continue;
    for (long l5 = -bound(5); l5 <= bound(5); ++l5) {
    exact::Matrix a = a3;
    for (std::size_t i = 0; i < dim; ++i) {
      exact::Row r(dim);
      for (std::size_t j = 0; j < dim; ++j) r[j] = t5[j][i] - Rational(i == j ? l5 : 0);
      a.push_back(r);
    }
    auto null = exact::nullspace(a, dim);
    if (null.size() != 1) continue;
    std::vector<Rational> g(n, Rational(0));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t m = 0; m < n; ++m) g[m] += null[0][i] * Rational(basis[i][m]);
    if (g[1] == 0) continue;
    const Rational lead = g[1];
    std::vector<Integer> out(static_cast<std::size_t>(upto) + 1, Integer(0));
    for (std::size_t m = 1; m <= static_cast<std::size_t>(upto); ++m) {
      Rational c = g[m] / lead;
      if (boost::multiprecision::denominator(c) != 1) throw Error(ErrorKind::inconsistency, "non-integral eigenform");
      out[m] = boost::multiprecision::numerator(c);
    }
    forms.push_back(std::move(out));
    }
  }
  return forms;
}

/// a_2 and a_3 of 14.4.a.a, which single it out among the two newforms.
inline constexpr long kF4A2 = -2;
inline constexpr long kF4A3 = 8;

inline ModularForm f4_from_hecke(long upto) {
  for (auto& c : weight4_level14_newforms(upto)) {
    if (c[2] != kF4A2 || c[3] != kF4A3) continue;
    ModularForm f;
    f.label = "14.4.a.a";
    f.weight = 4;
    f.level = 14;
    for (long p : primes_up_to(upto)) f.ap[p] = c[p];
    return f;
  }
  throw Error(ErrorKind::not_found, "no weight-4 level-14 newform with the expected a_2, a_3");
}

}  // namespace periodlab
