#pragma once

// Recognizing floating results as rationals of bounded height, and counting
// digits of agreement.

#include <optional>
#include <string>

#include "periodlab/numeric.hpp"

namespace periodlab {

struct RecognizedRational {
  Integer num;
  Integer den;  // > 0, gcd(num, den) = 1
  Real residual;

  Integer height() const {
    Integer a = boost::multiprecision::abs(num);
    return a > den ? a : den;
  }
  Rational value() const { return Rational(num, den); }
  std::string str() const { return format_rational(value()); }
};

/// Default recognition tolerance at `prec` requested digits: 10^(-prec/2).
inline Real default_tolerance(int prec) { return pow10(-prec / 2); }

/// Default height bound for recognized rationals.
inline Integer default_max_height() { return Integer(1000000); }

/// Walks the continued-fraction convergents of x and keeps the last one whose
/// denominator does not exceed `max_height` (the best approximation of that
/// height). It is accepted only if |x - p/q| < tol. Because the candidate does
/// not depend on tol, tightening tol can turn an answer into nullopt but never
/// into a different rational.
inline std::optional<RecognizedRational> recognize_rational(const Real& x, const Integer& max_height, const Real& tol) {
  if (!(tol > 0)) throw Error(ErrorKind::usage, "recognition tolerance must be positive");
  PrecisionScope scope(static_cast<int>(x.precision()));
  Integer p0(0), q0(1), p1(1), q1(0);
  Real r = x;
  bool have = false;
  for (int it = 0; it < 4096; ++it) {
    Real fl = boost::multiprecision::floor(r);
    Integer a = fl.convert_to<Integer>();
    Integer p2 = a * p1 + p0;
    Integer q2 = a * q1 + q0;
    if (q2 > max_height) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    have = true;
    Real frac = r - fl;
    if (frac == 0) break;
    // Once the convergent reproduces x to its own precision, further
    // partial quotients are rounding noise.
    if (boost::multiprecision::abs(x - Real(Rational(p1, q1))) <= boost::multiprecision::abs(x) * pow10(-static_cast<int>(x.precision()) + 2)) break;
    r = 1 / frac;
  }
  if (!have) return std::nullopt;
  RecognizedRational out;
  out.num = p1;
  out.den = q1;
  out.residual = boost::multiprecision::abs(x - Real(Rational(p1, q1)));
  if (!(out.residual < tol)) return std::nullopt;
  return out;
}

/// Recognizes a complex number that should be a real rational.
inline std::optional<RecognizedRational> recognize_rational(const Complex& z, const Integer& max_height, const Real& tol) {
  if (!(boost::multiprecision::abs(z.im) < tol)) return std::nullopt;
  auto r = recognize_rational(z.re, max_height, tol);
  if (r) r->residual = boost::multiprecision::max(r->residual, boost::multiprecision::abs(z.im));
  return r;
}

/// floor(-log10(|a - b| / max(|b|, 1e-300))); equal inputs return the
/// working precision of the operands.
inline int digits_agreement(const Real& a, const Real& b) {
  const int cap = static_cast<int>(std::max(a.precision(), b.precision()));
  PrecisionScope scope(cap + 5);
  Real diff = boost::multiprecision::abs(a - b);
  if (diff == 0) return cap;
  Real scale = boost::multiprecision::max(boost::multiprecision::abs(b), Real("1e-300"));
  Real d = -boost::multiprecision::log10(diff / scale);
  int out = boost::multiprecision::floor(d).convert_to<int>();
  return std::min(out, cap);
}

}  // namespace periodlab
