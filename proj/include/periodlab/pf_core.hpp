#pragma once

// Picard-Fuchs operators in theta-form, their singular points, the change of
// basis to d/dphi form, and the canonical Frobenius basis at a point of
// maximally unipotent monodromy at phi = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "periodlab/numeric.hpp"
#include "periodlab/polynomial.hpp"

namespace periodlab {

inline constexpr int kOperatorOrder = 4;

/// L = sum_i phi^i * sum_j coeffs[i][j] * theta^j with theta = phi d/dphi.
struct Operator {
  std::string name;
  std::string variable = "phi";
  std::vector<std::array<Integer, kOperatorOrder + 1>> coeffs;

  int phi_degree() const { return static_cast<int>(coeffs.size()) - 1; }

  const Integer& at(int i, int j) const { return coeffs.at(static_cast<std::size_t>(i))[static_cast<std::size_t>(j)]; }

  /// P_i(x) = sum_j coeffs[i][j] x^j.
  IntPoly theta_poly(int i) const {
    IntPoly p(coeffs[static_cast<std::size_t>(i)].begin(), coeffs[static_cast<std::size_t>(i)].end());
    trim(p);
    return p;
  }

  /// Coefficient R_4(phi) of theta^4.
  IntPoly leading() const {
    IntPoly p;
    for (const auto& row : coeffs) p.push_back(row[kOperatorOrder]);
    trim(p);
    return p;
  }
};

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto hash = line.find('#');
  std::string s = hash == std::string::npos ? line : line.substr(0, hash);
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] inline void parse_fail(int line, const std::string& msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace detail

inline void validate(const Operator& op) {
  if (op.coeffs.empty() || op.coeffs[0][kOperatorOrder] == 0)
    throw Error(ErrorKind::parse, "coefficient of theta^4 at phi^0 must be nonzero");
}

/// Reads the line-oriented operator format:
///   name <label>
///   variable <symbol>
///   c <i> <j> <integer>     (coefficient of phi^i theta^j)
/// Blank lines and '#' comments are ignored.
inline Operator parse_operator(std::istream& in) {
  Operator op;
  std::string raw;
  int line_no = 0;
  int content_line = 0;
  int max_j = -1;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip_comment(raw);
    if (line.empty()) continue;
    ++content_line;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (content_line == 1) {
      if (key != "name") detail::parse_fail(line_no, "expected 'name <label>'");
      std::getline(ls >> std::ws, op.name);
      if (op.name.empty()) detail::parse_fail(line_no, "empty operator name");
      continue;
    }
    if (content_line == 2) {
      if (key != "variable") detail::parse_fail(line_no, "expected 'variable <symbol>'");
      ls >> op.variable;
      if (op.variable.empty()) detail::parse_fail(line_no, "empty variable name");
      continue;
    }
    if (key != "c") detail::parse_fail(line_no, "expected 'c <i> <j> <integer>', got '" + key + "'");
    long i = -1;
    long j = -1;
    std::string value;
    if (!(ls >> i >> j >> value)) detail::parse_fail(line_no, "malformed coefficient entry");
    std::string rest;
    if (ls >> rest) detail::parse_fail(line_no, "trailing text '" + rest + "'");
    if (i < 0 || j < 0) detail::parse_fail(line_no, "negative index");
    if (j > kOperatorOrder)
      throw Error(ErrorKind::unsupported_order,
                  "line " + std::to_string(line_no) + ": theta-order " + std::to_string(j) + " exceeds 4");
    if (i > 4096) detail::parse_fail(line_no, "phi-degree too large");
    Integer v;
    try {
      if (value.empty() || value.find_first_not_of("+-0123456789") != std::string::npos) throw std::invalid_argument(value);
      v = parse_integer(value);
    } catch (const std::exception&) {
      detail::parse_fail(line_no, "not an integer: '" + value + "'");
    }
    if (static_cast<std::size_t>(i) >= op.coeffs.size()) {
      std::array<Integer, kOperatorOrder + 1> zero;
      zero.fill(Integer(0));
      op.coeffs.resize(static_cast<std::size_t>(i) + 1, zero);
    }
    op.coeffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    if (v != 0) max_j = std::max(max_j, static_cast<int>(j));
  }
  if (content_line < 2) throw Error(ErrorKind::parse, "missing name/variable header");
  if (max_j != kOperatorOrder)
    throw Error(ErrorKind::unsupported_order, "theta-order is " + std::to_string(max_j) + ", expected 4");
  while (op.coeffs.size() > 1) {
    const auto& last = op.coeffs.back();
    if (std::any_of(last.begin(), last.end(), [](const Integer& x) { return x != 0; })) break;
    op.coeffs.pop_back();
  }
  validate(op);
  return op;
}

inline Operator parse_operator(const std::string& text) {
  std::istringstream in(text);
  return parse_operator(in);
}

inline std::string serialize_operator(const Operator& op) {
  std::ostringstream os;
  os << "name " << op.name << '\n' << "variable " << op.variable << '\n';
  for (std::size_t i = 0; i < op.coeffs.size(); ++i)
    for (std::size_t j = 0; j <= kOperatorOrder; ++j)
      if (op.coeffs[i][j] != 0) os << "c " << i << ' ' << j << ' ' << op.coeffs[i][j] << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Singular points.

struct SingularPoint {
  enum class Kind { rational, approximate, infinity };
  Kind kind = Kind::rational;
  Rational exact;  // valid for Kind::rational
  Complex value;   // numeric location (finite kinds)
  Real radius;     // isolating radius; 0 for exact points

  bool finite() const { return kind != Kind::infinity; }
};

namespace detail {

/// Simultaneous Durand-Kerner iteration; returns all complex roots.
inline std::vector<Complex> polynomial_roots(const RatPoly& p, int digits) {
  PrecisionScope scope(digits);
  const int n = degree(p);
  std::vector<Complex> roots;
  if (n <= 0) return roots;
  std::vector<Complex> monic(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) monic[static_cast<std::size_t>(k)] = Complex(Rational(p[static_cast<std::size_t>(k)] / p[static_cast<std::size_t>(n)]));
  auto eval = [&](const Complex& z) {
    Complex acc(0);
    for (int k = n; k >= 0; --k) acc = acc * z + monic[static_cast<std::size_t>(k)];
    return acc;
  };
  Complex seed(Real("0.4"), Real("0.9"));
  roots.resize(static_cast<std::size_t>(n));
  Real bound(1);
  for (int k = 0; k < n; ++k) bound = boost::multiprecision::max(bound, 1 + abs(monic[static_cast<std::size_t>(k)]));
  for (int k = 0; k < n; ++k) roots[static_cast<std::size_t>(k)] = pow(seed, static_cast<unsigned>(k)) * bound;
  const Real tol = pow10(-digits + 3);
  for (int iter = 0; iter < 2000; ++iter) {
    Real change(0);
    for (int k = 0; k < n; ++k) {
      Complex den(1);
      for (int j = 0; j < n; ++j)
        if (j != k) den *= roots[static_cast<std::size_t>(k)] - roots[static_cast<std::size_t>(j)];
      Complex step = eval(roots[static_cast<std::size_t>(k)]) / den;
      roots[static_cast<std::size_t>(k)] -= step;
      change = boost::multiprecision::max(change, abs(step));
    }
    if (change < tol) break;
  }
  return roots;
}

/// Best rational approximation with denominator at most `max_den`.
inline Rational nearest_rational(const Real& x, const Integer& max_den) {
  Integer p0(0), q0(1), p1(1), q1(0);
  Real r = x;
  for (int it = 0; it < 200; ++it) {
    Real fl = boost::multiprecision::floor(r);
    Integer a(fl.convert_to<Integer>());
    Integer p2 = a * p1 + p0;
    Integer q2 = a * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    Real frac = r - fl;
    if (frac == 0) break;
    r = 1 / frac;
  }
  return Rational(p1, q1);
}

}  // namespace detail

/// Finite singular points are 0 and the roots of R_4; infinity is always
/// appended. Rational roots are found exactly; any remaining roots are
/// returned numerically with an isolating radius.
inline std::vector<SingularPoint> singular_points(const Operator& op, int digits = 40) {
  PrecisionScope scope(digits);
  std::vector<SingularPoint> out;
  SingularPoint zero;
  zero.kind = SingularPoint::Kind::rational;
  zero.exact = 0;
  zero.value = Complex(0);
  zero.radius = 0;
  out.push_back(zero);

  RatPoly rem;
  for (const auto& c : op.leading()) rem.emplace_back(c);
  std::vector<Rational> rational_roots;
  for (bool found = true; found && degree(rem) > 0;) {
    found = false;
    const Integer lead_den = boost::multiprecision::numerator(rem[static_cast<std::size_t>(degree(rem))]) *
                             boost::multiprecision::denominator(rem[static_cast<std::size_t>(degree(rem))]);
    for (const auto& z : detail::polynomial_roots(rem, digits)) {
      if (boost::multiprecision::abs(z.im) > pow10(-digits / 2)) continue;
      Rational cand = detail::nearest_rational(z.re, boost::multiprecision::abs(lead_den) + 1);
      if (poly_eval_exact(rem, cand) != 0) continue;
      rational_roots.push_back(cand);
      // Deflate by (x - cand).
      RatPoly q(rem.size() - 1, Rational(0));
      Rational carry(0);
      for (int k = degree(rem); k >= 1; --k) {
        carry = rem[static_cast<std::size_t>(k)] + carry * cand;
        q[static_cast<std::size_t>(k - 1)] = carry;
      }
      rem = q;
      trim(rem);
      found = true;
      break;
    }
  }
  std::sort(rational_roots.begin(), rational_roots.end(), [](const Rational& a, const Rational& b) {
    return boost::multiprecision::abs(a) != boost::multiprecision::abs(b) ? boost::multiprecision::abs(a) < boost::multiprecision::abs(b) : a < b;
  });
  rational_roots.erase(std::unique(rational_roots.begin(), rational_roots.end()), rational_roots.end());
  for (const auto& r : rational_roots) {
    SingularPoint s;
    s.kind = SingularPoint::Kind::rational;
    s.exact = r;
    s.value = Complex(r);
    s.radius = 0;
    out.push_back(s);
  }
  if (degree(rem) > 0) {
    const int n = degree(rem);
    RatPoly deriv;
    for (int k = 1; k <= n; ++k) deriv.push_back(rem[static_cast<std::size_t>(k)] * k);
    for (const auto& z : detail::polynomial_roots(rem, digits)) {
      SingularPoint s;
      s.kind = SingularPoint::Kind::approximate;
      s.value = z;
      Complex dp = poly_eval(deriv, z);
      s.radius = is_zero(dp) ? Real(1) : Real(n) * abs(poly_eval(rem, z)) / abs(dp);
      out.push_back(s);
    }
  }
  SingularPoint inf;
  inf.kind = SingularPoint::Kind::infinity;
  inf.radius = 0;
  out.push_back(inf);
  return out;
}

inline std::vector<Complex> finite_singular_values(const Operator& op, int digits) {
  std::vector<Complex> v;
  for (const auto& s : singular_points(op, digits))
    if (s.finite()) v.push_back(s.value);
  return v;
}

// ---------------------------------------------------------------------------
// d/dphi form.

/// sum_j p[j](phi) (d/dphi)^j.
struct DOperator {
  std::array<IntPoly, kOperatorOrder + 1> p;
};

/// Stirling numbers of the second kind S(n, k).
inline Integer stirling2(int n, int k) {
  if (n == 0 && k == 0) return 1;
  if (n == 0 || k == 0 || k > n) return 0;
  std::vector<std::vector<Integer>> s(static_cast<std::size_t>(n) + 1, std::vector<Integer>(static_cast<std::size_t>(n) + 1, Integer(0)));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= i; ++j)
      s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          Integer(j) * s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] + s[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
  return s[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

/// Rewrites theta^k = sum_j S(k, j) phi^j (d/dphi)^j.
inline DOperator theta_to_d(const Operator& op) {
  DOperator d;
  for (int i = 0; i <= op.phi_degree(); ++i) {
    for (int k = 0; k <= kOperatorOrder; ++k) {
      const Integer& c = op.at(i, k);
      if (c == 0) continue;
      for (int j = 0; j <= k; ++j) {
        Integer s = stirling2(k, j);
        if (s == 0) continue;
        auto& poly = d.p[static_cast<std::size_t>(j)];
        const std::size_t e = static_cast<std::size_t>(i + j);
        if (poly.size() <= e) poly.resize(e + 1, Integer(0));
        poly[e] += c * s;
      }
    }
  }
  for (auto& poly : d.p) trim(poly);
  return d;
}

/// Applies the theta-form operator to a polynomial in phi.
inline IntPoly apply(const Operator& op, const IntPoly& y) {
  IntPoly out;
  for (int i = 0; i <= op.phi_degree(); ++i) {
    for (std::size_t m = 0; m < y.size(); ++m) {
      if (y[m] == 0) continue;
      Integer s(0);
      Integer mp(1);
      for (int j = 0; j <= kOperatorOrder; ++j) {
        s += op.at(i, j) * mp;
        mp *= static_cast<long>(m);
      }
      const std::size_t e = m + static_cast<std::size_t>(i);
      if (out.size() <= e) out.resize(e + 1, Integer(0));
      out[e] += s * y[m];
    }
  }
  trim(out);
  return out;
}

/// Applies the d/dphi-form operator to a polynomial in phi.
inline IntPoly apply(const DOperator& dop, const IntPoly& y) {
  IntPoly out;
  IntPoly deriv = y;
  for (int j = 0; j <= kOperatorOrder; ++j) {
    out = poly_add(out, poly_mul(dop.p[static_cast<std::size_t>(j)], deriv));
    IntPoly next;
    for (std::size_t m = 1; m < deriv.size(); ++m) next.push_back(deriv[m] * static_cast<long>(m));
    deriv = next;
  }
  trim(out);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical Frobenius basis at phi = 0.

/// f[k][n] is the phi^n coefficient of f_k in
///   w_k = (2 pi i)^-k sum_{j<=k} C(k, j) f_{k-j} log(phi)^j.
struct CanonicalBasis {
  int order = 0;
  std::array<std::vector<Rational>, 4> f;
  double radius = 0;  // distance from 0 to the nearest other singularity

  /// Decimal digits the truncation supports at |phi| = r (heuristic tail bound).
  double precision_hint(double r) const;
};

/// AESZ34 holomorphic period coefficient: sum over i+j+k+l+m = n of the
/// squared multinomial coefficient.
inline Integer holomorphic_coefficient(int n) {
  if (n < 0) return 0;
  std::vector<Integer> fact(static_cast<std::size_t>(n) + 1);
  fact[0] = 1;
  for (int i = 1; i <= n; ++i) fact[static_cast<std::size_t>(i)] = fact[static_cast<std::size_t>(i - 1)] * i;
  Integer total(0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j)
      for (int k = 0; i + j + k <= n; ++k)
        for (int l = 0; i + j + k + l <= n; ++l) {
          const int m = n - i - j - k - l;
          Integer c = fact[static_cast<std::size_t>(n)] /
                      (fact[static_cast<std::size_t>(i)] * fact[static_cast<std::size_t>(j)] * fact[static_cast<std::size_t>(k)] *
                       fact[static_cast<std::size_t>(l)] * fact[static_cast<std::size_t>(m)]);
          total += c * c;
        }
  return total;
}

namespace detail {

using EpsSeries = std::array<Rational, 4>;  // truncated mod eps^4

inline EpsSeries eps_mul(const EpsSeries& a, const EpsSeries& b) {
  EpsSeries c;
  for (int i = 0; i < 4; ++i) {
    Rational s(0);
    for (int j = 0; j <= i; ++j)
      if (a[static_cast<std::size_t>(j)] != 0 && b[static_cast<std::size_t>(i - j)] != 0) s += a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(i - j)];
    c[static_cast<std::size_t>(i)] = s;
  }
  return c;
}

/// P(x + eps) as a truncated series in eps.
inline EpsSeries shifted(const IntPoly& p, const Integer& x) {
  EpsSeries out;
  for (int m = 0; m < 4; ++m) {
    Integer s(0);
    Integer xp(1);
    for (std::size_t j = static_cast<std::size_t>(m); j < p.size(); ++j) {
      s += p[j] * binomial(static_cast<unsigned>(j), static_cast<unsigned>(m)) * xp;
      xp *= x;
    }
    out[static_cast<std::size_t>(m)] = Rational(s);
  }
  return out;
}

inline EpsSeries eps_inverse(const EpsSeries& b) {
  EpsSeries inv;
  inv[0] = 1 / b[0];
  for (int m = 1; m < 4; ++m) {
    Rational s(0);
    for (int j = 1; j <= m; ++j) s += b[static_cast<std::size_t>(j)] * inv[static_cast<std::size_t>(m - j)];
    inv[static_cast<std::size_t>(m)] = -s * inv[0];
  }
  return inv;
}

inline double min_nonzero_singular_distance(const Operator& op) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : singular_points(op, 30)) {
    if (!s.finite()) continue;
    double d = abs(s.value).convert_to<double>();
    if (d > 0) r = std::min(r, d);
  }
  return r;
}

}  // namespace detail

/// Rejects operators whose indicial polynomial at phi = 0 is not c * rho^4.
inline void require_mum(const Operator& op) {
  for (int j = 0; j < kOperatorOrder; ++j)
    if (op.at(0, j) != 0) throw Error(ErrorKind::not_mum, "indicial equation at 0 is not rho^4 (" + op.name + ")");
}

/// Solves the recurrence for phi^eps * sum_n a_n(eps) phi^n modulo eps^4;
/// f_k[n] = k! [eps^k] a_n(eps).
inline CanonicalBasis frobenius_mum(const Operator& op, int order) {
  require_mum(op);
  if (order < 0) throw Error(ErrorKind::usage, "truncation order must be non-negative");
  const int d = op.phi_degree();
  std::vector<IntPoly> theta_polys;
  for (int i = 0; i <= d; ++i) theta_polys.push_back(op.theta_poly(i));

  std::vector<detail::EpsSeries> a;
  a.reserve(static_cast<std::size_t>(order) + 1);
  detail::EpsSeries a0;
  a0.fill(Rational(0));
  a0[0] = 1;
  a.push_back(a0);
  for (int n = 1; n <= order; ++n) {
    detail::EpsSeries acc;
    acc.fill(Rational(0));
    for (int i = 1; i <= std::min(n, d); ++i) {
      if (theta_polys[static_cast<std::size_t>(i)].empty()) continue;
      auto term = detail::eps_mul(detail::shifted(theta_polys[static_cast<std::size_t>(i)], Integer(n - i)), a[static_cast<std::size_t>(n - i)]);
      for (int m = 0; m < 4; ++m) acc[static_cast<std::size_t>(m)] += term[static_cast<std::size_t>(m)];
    }
    auto inv = detail::eps_inverse(detail::shifted(theta_polys[0], Integer(n)));
    auto an = detail::eps_mul(acc, inv);
    for (auto& x : an) x = -x;
    a.push_back(an);
  }

  CanonicalBasis basis;
  basis.order = order;
  const std::array<int, 4> fact = {1, 1, 2, 6};
  for (int k = 0; k < 4; ++k) {
    auto& fk = basis.f[static_cast<std::size_t>(k)];
    fk.reserve(a.size());
    for (const auto& an : a) fk.push_back(an[static_cast<std::size_t>(k)] * fact[static_cast<std::size_t>(k)]);
  }
  basis.radius = detail::min_nonzero_singular_distance(op);
  return basis;
}

// ---------------------------------------------------------------------------
// Evaluation.

/// A point together with the chosen value of log(phi).
struct BranchedPoint {
  Complex value;
  Complex log_value;

  /// Principal branch: log(-1) = +i pi.
  static BranchedPoint principal(const Complex& z) { return {z, log(z)}; }
  static BranchedPoint principal(const Rational& q) {
    Complex z(q);
    return {z, log(z)};
  }
};

/// Rows are solutions, columns are phi-derivative orders 0..3.
struct StateMatrix {
  BranchedPoint at;
  Mat4<Complex> w;
  int precision = 0;  // requested decimal digits
};

namespace detail {

inline double log10_abs(const Rational& q) {
  if (q == 0) return -std::numeric_limits<double>::infinity();
  PrecisionScope scope(20);
  Real x = boost::multiprecision::abs(Real(q));
  return boost::multiprecision::log10(x).convert_to<double>();
}

/// log10 of a crude bound on the truncation error for value and three
/// derivatives at |phi| = r: the geometric tail past the last computed term.
inline double log10_tail(const CanonicalBasis& b, double r, double abs_log) {
  const int n = b.order;
  double lead = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 4; ++k)
    for (int m = std::max(0, n - 3); m <= n; ++m)
      lead = std::max(lead, log10_abs(b.f[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)]) + m * std::log10(r));
  const double q = r / b.radius;
  // Third derivatives carry an extra n^3 / r^3; log powers up to (1 + |log|)^3.
  return lead + 3 * std::log10(std::max(1, n)) - 3 * std::min(0.0, std::log10(r)) + 3 * std::log10(1 + abs_log) -
         std::log10(1 - q);
}

}  // namespace detail

inline double CanonicalBasis::precision_hint(double r) const {
  if (r <= 0 || r >= radius) return 0;
  return -detail::log10_tail(*this, r, std::abs(std::log(r)) + M_PI);
}

/// Smallest truncation order that the tail bound predicts to be sufficient
/// for `prec` digits at `at`, extrapolating geometrically from `basis`.
inline int required_order(const CanonicalBasis& basis, const BranchedPoint& at, int prec) {
  const double r = abs(at.value).convert_to<double>();
  const double abs_log = abs(at.log_value).convert_to<double>();
  const double t = detail::log10_tail(basis, r, abs_log);
  const double target = -(prec + 10);
  if (t < target) return basis.order;
  const double q = std::log10(r / basis.radius);
  return basis.order + static_cast<int>(std::ceil((t - target) / -q)) + 4;
}

/// Values and first three phi-derivatives of the canonical periods at `at`,
/// obtained by term-wise differentiation of the log-ansatz.
inline StateMatrix eval_canonical(const CanonicalBasis& basis, const BranchedPoint& at, int prec) {
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const double r = abs(at.value).convert_to<double>();
  if (!(r > 0) || r >= basis.radius)
    throw Error(ErrorKind::out_of_disc, "|phi| = " + std::to_string(r) + " is outside the convergence disc of radius " +
                                            std::to_string(basis.radius));
  const int needed = required_order(basis, at, prec);
  if (needed > basis.order)
    throw Error(ErrorKind::precision,
                "truncation order " + std::to_string(basis.order) + " is insufficient; need N >= " + std::to_string(needed));

  const Complex& x = at.value;
  const int n = basis.order;
  std::vector<Complex> xp(static_cast<std::size_t>(n) + 1);
  xp[0] = Complex(1);
  for (int k = 1; k <= n; ++k) xp[static_cast<std::size_t>(k)] = xp[static_cast<std::size_t>(k - 1)] * x;

  // g[k][m] = f_k^{(m)}(x) / m!
  std::array<std::array<Complex, 4>, 4> g;
  for (int k = 0; k < 4; ++k) {
    std::array<Complex, 4> acc;
    for (int t = 0; t <= n; ++t) {
      const Rational& c = basis.f[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
      if (c == 0) continue;
      Real cr(c);
      for (int m = 0; m <= std::min(t, 3); ++m) {
        Real coef = cr * Real(binomial(static_cast<unsigned>(t), static_cast<unsigned>(m)));
        acc[static_cast<std::size_t>(m)] += xp[static_cast<std::size_t>(t - m)] * coef;
      }
    }
    g[static_cast<std::size_t>(k)] = acc;
  }

  // Taylor coefficients of log(x + h) in h.
  using Series = std::array<Complex, 4>;
  auto mul = [](const Series& a, const Series& b) {
    Series c;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; i + j < 4; ++j) c[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return c;
  };
  Series lg;
  lg[0] = at.log_value;
  Complex inv = Complex(1) / x;
  lg[1] = inv;
  lg[2] = -(inv * inv) / Real(2);
  lg[3] = inv * inv * inv / Real(3);
  std::array<Series, 4> lpow;
  lpow[0] = Series{Complex(1), Complex(0), Complex(0), Complex(0)};
  for (int j = 1; j < 4; ++j) lpow[static_cast<std::size_t>(j)] = mul(lpow[static_cast<std::size_t>(j - 1)], lg);

  const auto& cst = constants(wp);
  StateMatrix out;
  out.at = at;
  out.precision = prec;
  const std::array<int, 4> fact = {1, 1, 2, 6};
  for (int i = 0; i < 4; ++i) {
    Series s;
    for (int j = 0; j <= i; ++j) {
      Series term = mul(g[static_cast<std::size_t>(i - j)], lpow[static_cast<std::size_t>(j)]);
      Real bc(binomial(static_cast<unsigned>(i), static_cast<unsigned>(j)));
      for (int m = 0; m < 4; ++m) s[static_cast<std::size_t>(m)] += term[static_cast<std::size_t>(m)] * bc;
    }
    for (int m = 0; m < 4; ++m)
      out.w[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = s[static_cast<std::size_t>(m)] * Real(fact[static_cast<std::size_t>(m)]) / cst.two_pi_i_pow[static_cast<std::size_t>(i)];
  }
  return out;
}

/// Canonical basis with a truncation order chosen so that eval_canonical at
/// `at` meets `prec` digits.
inline CanonicalBasis frobenius_for(const Operator& op, const BranchedPoint& at, int prec) {
  const double rho = detail::min_nonzero_singular_distance(op);
  const double r = abs(at.value).convert_to<double>();
  if (!(r > 0) || r >= rho)
    throw Error(ErrorKind::out_of_disc, "|phi| = " + std::to_string(r) + " is outside the convergence disc of radius " + std::to_string(rho));
  int order = std::max(16, static_cast<int>(std::ceil((prec + 10) / std::log10(rho / r))) + 8);
  for (int attempt = 0; attempt < 8; ++attempt) {
    CanonicalBasis b = frobenius_mum(op, order);
    const int need = required_order(b, at, prec);
    if (need <= order) return b;
    order = need;
  }
  throw Error(ErrorKind::precision, "could not reach the requested truncation order");
}

}  // namespace periodlab
