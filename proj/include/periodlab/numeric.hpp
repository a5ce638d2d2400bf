#pragma once

// Arbitrary-precision scalar types shared by every module.
//
// Real is an MPFR float whose precision is taken from the thread default at
// construction time; results of arithmetic keep the larger operand precision.
// Top-level operations open a PrecisionScope so that every temporary they
// create carries the working precision.

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "periodlab/error.hpp"

namespace periodlab {

using Real = boost::multiprecision::mpfr_float;
using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Extra decimal digits carried beyond the requested precision.
inline constexpr int kGuardDigits = 15;

inline int working_digits(int prec) { return prec + kGuardDigits; }

class PrecisionScope {
 public:
  explicit PrecisionScope(int digits) : saved_(Real::default_precision()) {
    Real::default_precision(static_cast<unsigned>(digits));
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real pow10(int e) { return boost::multiprecision::pow(Real(10), e); }

// Always convert through a materialized Rational or Integer: constructing a
// Real straight from a GMP expression template picks up a bogus precision.
inline Real to_real(const Rational& q) { return Real(q); }
inline Real to_real(const Integer& n) { return Real(n); }

// ---------------------------------------------------------------------------
// Complex numbers over Real. std::complex is unspecified for non-builtin
// element types, so this is a small value type with the operations we need.

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(const Real& r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const Real& r, const Real& i) : re(r), im(i) {}
  Complex(int r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(const Rational& q) : re(Real(q)), im(0) {}  // NOLINT(google-explicit-constructor)

  static Complex i() { return {Real(0), Real(1)}; }

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator*=(const Real& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    Real d = o.re * o.re + o.im * o.im;
    if (d == 0) throw Error(ErrorKind::division, "complex division by zero");
    Real r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const Real& s) {
    re /= s;
    im /= s;
    return *this;
  }
};

inline Complex operator+(Complex a, const Complex& b) { return a += b; }
inline Complex operator-(Complex a, const Complex& b) { return a -= b; }
inline Complex operator*(Complex a, const Complex& b) { return a *= b; }
inline Complex operator/(Complex a, const Complex& b) { return a /= b; }
inline Complex operator*(Complex a, const Real& s) { return a *= s; }
inline Complex operator*(const Real& s, Complex a) { return a *= s; }
inline Complex operator/(Complex a, const Real& s) { return a /= s; }
inline Complex operator-(const Complex& a) { return {-a.re, -a.im}; }

inline Complex conj(const Complex& z) { return {z.re, -z.im}; }
inline Real norm(const Complex& z) { return z.re * z.re + z.im * z.im; }
inline Real abs(const Complex& z) { return boost::multiprecision::sqrt(norm(z)); }
inline Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }
inline bool is_zero(const Complex& z) { return z.re == 0 && z.im == 0; }

inline Complex exp(const Complex& z) {
  Real m = boost::multiprecision::exp(z.re);
  return {m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im)};
}

/// Principal branch, arg in (-pi, pi]; a negative real with +0 imaginary part
/// maps to ln|z| + i*pi.
inline Complex log(const Complex& z) {
  if (is_zero(z)) throw Error(ErrorKind::division, "log of zero");
  return {boost::multiprecision::log(abs(z)), arg(z)};
}

inline Complex pow(Complex base, unsigned e) {
  Complex result(1);
  while (e > 0) {
    if (e & 1u) result *= base;
    base *= base;
    e >>= 1u;
  }
  return result;
}

inline Complex sqrt(const Complex& z) {
  Real r = abs(z);
  Real a = boost::multiprecision::sqrt((r + z.re) / 2);
  Real b = boost::multiprecision::sqrt((r - z.re) / 2);
  if (z.im < 0) b = -b;
  return {a, b};
}

// ---------------------------------------------------------------------------
// Constants, cached per precision (in digits).

struct Constants {
  Real pi;
  Complex two_pi_i;
  std::array<Complex, 13> two_pi_i_pow;  // (2*pi*i)^k, k = 0..12
};

inline const Constants& constants(int digits) {
  thread_local std::map<int, Constants> cache;
  auto it = cache.find(digits);
  if (it != cache.end()) return it->second;
  PrecisionScope scope(digits);
  Constants c;
  mpfr_const_pi(c.pi.backend().data(), MPFR_RNDN);
  c.two_pi_i = Complex(Real(0), 2 * c.pi);
  c.two_pi_i_pow[0] = Complex(1);
  for (std::size_t k = 1; k < c.two_pi_i_pow.size(); ++k) {
    c.two_pi_i_pow[k] = c.two_pi_i_pow[k - 1] * c.two_pi_i;
  }
  return cache.emplace(digits, std::move(c)).first->second;
}

// ---------------------------------------------------------------------------
// Fixed 4x4 matrices.

template <class T>
using Mat4 = std::array<std::array<T, 4>, 4>;

template <class T>
Mat4<T> identity4() {
  Mat4<T> m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = T(i == j ? 1 : 0);
  return m;
}

template <class T>
Mat4<T> operator*(const Mat4<T>& a, const Mat4<T>& b) {
  Mat4<T> c;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      T s(0);
      for (int k = 0; k < 4; ++k) s += a[i][k] * b[k][j];
      c[i][j] = s;
    }
  }
  return c;
}

template <class T>
Mat4<T> transpose(const Mat4<T>& a) {
  Mat4<T> t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) t[i][j] = a[j][i];
  return t;
}

inline Mat4<Complex> conj(const Mat4<Complex>& a) {
  Mat4<Complex> c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i][j] = conj(a[i][j]);
  return c;
}

/// Gauss-Jordan with partial pivoting on |.|^2.
inline Mat4<Complex> inverse(const Mat4<Complex>& m) {
  Mat4<Complex> a = m;
  Mat4<Complex> inv = identity4<Complex>();
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    Real best = norm(a[col][col]);
    for (int r = col + 1; r < 4; ++r) {
      Real n = norm(a[r][col]);
      if (n > best) {
        best = n;
        piv = r;
      }
    }
    if (best == 0) throw Error(ErrorKind::division, "singular 4x4 matrix");
    std::swap(a[col], a[piv]);
    std::swap(inv[col], inv[piv]);
    Complex p = a[col][col];
    for (int j = 0; j < 4; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      Complex f = a[r][col];
      if (is_zero(f)) continue;
      for (int j = 0; j < 4; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

inline Complex det(const Mat4<Complex>& m) {
  Mat4<Complex> a = m;
  Complex d(1);
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    Real best = norm(a[col][col]);
    for (int r = col + 1; r < 4; ++r) {
      Real n = norm(a[r][col]);
      if (n > best) {
        best = n;
        piv = r;
      }
    }
    if (best == 0) return Complex(0);
    if (piv != col) {
      std::swap(a[col], a[piv]);
      d = -d;
    }
    d *= a[col][col];
    for (int r = col + 1; r < 4; ++r) {
      Complex f = a[r][col] / a[col][col];
      for (int j = col; j < 4; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return d;
}

/// Largest entrywise |a - b|.
inline Real max_abs_diff(const Mat4<Complex>& a, const Mat4<Complex>& b) {
  Real m(0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = boost::multiprecision::max(m, abs(a[i][j] - b[i][j]));
  return m;
}

inline Real max_abs(const Mat4<Complex>& a) {
  Real m(0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m = boost::multiprecision::max(m, abs(a[i][j]));
  return m;
}

inline Mat4<Complex> to_complex(const Mat4<Rational>& q) {
  Mat4<Complex> c;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) c[i][j] = Complex(q[i][j]);
  return c;
}

// ---------------------------------------------------------------------------
// Formatting and parsing.

/// Fixed-point rendering with `digits` significant digits.
/// `digits` significant digits; fixed notation for 1e-6 <= |x| < 1e6.
inline std::string format_real(const Real& x, int digits) {
  if (x == 0) return "0";
  const long e = boost::multiprecision::floor(boost::multiprecision::log10(boost::multiprecision::abs(x))).convert_to<long>();
  if (e < -6 || e >= 6) return x.str(std::max(digits - 1, 0), std::ios_base::scientific);
  return x.str(static_cast<std::streamsize>(std::max<long>(digits - 1 - e, 0)), std::ios_base::fixed);
}

inline std::string format_rational(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

/// Base-10 integer with an optional sign. GMP's own string constructor would
/// read "025" as octal and "0x1f" as hex.
inline Integer parse_integer(std::string_view text) {
  std::string s(text);
  std::size_t start = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
  if (start == s.size() || s.find_first_not_of("0123456789", start) != std::string::npos)
    throw Error(ErrorKind::parse, "not an integer: '" + s + "'");
  const bool neg = s[0] == '-';
  std::size_t first = s.find_first_not_of('0', start);
  Integer v(first == std::string::npos ? std::string("0") : s.substr(first));
  return neg ? Integer(-v) : v;
}

/// Accepts `p`, `p/q`, or a decimal literal such as `-0.125`.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error(ErrorKind::parse, "empty rational");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Integer num = parse_integer(s.substr(0, slash));
      Integer den = parse_integer(s.substr(slash + 1));
      if (den == 0) throw Error(ErrorKind::parse, "zero denominator in '" + s + "'");
      return Rational(num, den);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      if (digits.empty() || digits == "-" || digits == "+") throw Error(ErrorKind::parse, "bad decimal '" + s + "'");
      if (s.find_first_of("+-", 1) != std::string::npos) throw Error(ErrorKind::parse, "bad decimal '" + s + "'");
      Integer num = parse_integer(digits);
      Integer den = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(s.size() - dot - 1));
      return Rational(num, den);
    }
    return Rational(parse_integer(s));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse, "not a rational number: '" + s + "'");
  }
}

}  // namespace periodlab
