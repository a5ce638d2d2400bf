#pragma once

// L-values of level-N newforms at integer points, archimedean gamma factors,
// and the j-invariant.

#include <mpfr.h>

#include <optional>
#include <string>
#include <vector>

#include "periodlab/deligne.hpp"
#include "periodlab/modular.hpp"

namespace periodlab {

/// Gamma(m, x) = (m-1)! e^-x sum_{j<m} x^j / j! for integer m >= 1.
inline Real incomplete_gamma(int m, const Real& x) {
  if (m < 1) throw Error(ErrorKind::usage, "incomplete gamma needs a positive integer order");
  Real term(1), sum(1);
  for (int j = 1; j < m; ++j) {
    term = term * x / j;
    sum += term;
  }
  Real fact(1);
  for (int j = 2; j < m; ++j) fact *= j;
  return fact * boost::multiprecision::exp(-x) * sum;
}

/// The two halves of the completed L-function split at t:
///   Lambda(s) = head + eps * tail,
///   head = sum a_n (A/n)^s Gamma(s, n t / A),
///   tail = sum a_n (A/n)^(k-s) Gamma(k-s, n / (t A)),   A = sqrt(N) / (2 pi).
struct SplitSums {
  Real head;
  Real tail;
  long terms = 0;
};

inline long l_value_cutoff(const ModularForm& f, int prec, const Rational& t) {
  const double a = std::sqrt(static_cast<double>(f.level)) / (2 * M_PI);
  const double td = t.convert_to<double>();
  const double stretch = std::max(td, 1 / td);
  return static_cast<long>(std::ceil((working_digits(prec) + 10 + 2 * f.weight) * std::log(10.0) * a * stretch)) + 16;
}

inline SplitSums split_sums(const ModularForm& f, const std::vector<Integer>& a, int s, int prec, const Rational& t) {
  const int k = f.weight;
  if (s < 1 || s > k - 1) throw Error(ErrorKind::usage, "s must satisfy 1 <= s <= k - 1");
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const long nmax = l_value_cutoff(f, prec, t);
  if (static_cast<long>(a.size()) <= nmax)
    throw Error(ErrorKind::gap, "need coefficients up to n = " + std::to_string(nmax));
  const Real A = boost::multiprecision::sqrt(Real(f.level)) / (2 * constants(wp).pi);
  const Real tr = to_real(t);
  SplitSums out;
  out.head = 0;
  out.tail = 0;
  for (long n = 1; n <= nmax; ++n) {
    if (a[n] == 0) continue;
    const Real an = to_real(a[n]);
    const Real r = A / n;
    out.head += an * boost::multiprecision::pow(r, s) * incomplete_gamma(s, n * tr / A);
    out.tail += an * boost::multiprecision::pow(r, k - s) * incomplete_gamma(k - s, n / (tr * A));
  }
  out.terms = nmax;
  return out;
}

struct LValue {
  Real value;       // L(f, s)
  Real completed;   // Lambda(f, s)
  int eps = 0;      // functional-equation sign that made the splits agree
  Real split_gap;   // |Lambda_{t=1} - Lambda_{t=6/5}|
  long terms = 0;
};

/// Converts Lambda(s) to L(s) by dividing by (sqrt(N)/2pi)^s Gamma(s).
inline Real completed_to_l(const ModularForm& f, int s, const Real& completed, int prec) {
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const Real A = boost::multiprecision::sqrt(Real(f.level)) / (2 * constants(wp).pi);
  Real fact(1);
  for (int j = 2; j < s; ++j) fact *= j;
  return completed / (boost::multiprecision::pow(A, s) * fact);
}

/// L(f, s) for integer 1 <= s <= k - 1 via the approximate functional
/// equation. The sign eps is the one for which the split parameters t = 1
/// and t = 6/5 agree; t = 3/2 breaks a tie.
inline LValue l_value(const ModularForm& f, int s, int prec) {
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const Rational t1(1), t2(6, 5), t3(3, 2);
  const long nmax = std::max({l_value_cutoff(f, prec, t1), l_value_cutoff(f, prec, t2), l_value_cutoff(f, prec, t3)});
  const auto a = expand_coefficients(f, nmax);
  const SplitSums x = split_sums(f, a, s, prec, t1);
  const SplitSums y = split_sums(f, a, s, prec, t2);
  auto gap = [](const SplitSums& u, const SplitSums& v, int e) {
    return boost::multiprecision::abs((u.head + e * u.tail) - (v.head + e * v.tail));
  };
  auto tol = [&](const SplitSums& u, int e) {
    return pow10(-(prec - 5)) * boost::multiprecision::max(Real(1), boost::multiprecision::abs(u.head + e * u.tail));
  };
  const bool plus = gap(x, y, 1) < tol(x, 1);
  const bool minus = gap(x, y, -1) < tol(x, -1);
  int eps = 0;
  if (plus && !minus) eps = 1;
  if (minus && !plus) eps = -1;
  if (plus && minus) {
    const SplitSums z = split_sums(f, a, s, prec, t3);
    const bool p3 = gap(x, z, 1) < tol(x, 1);
    const bool m3 = gap(x, z, -1) < tol(x, -1);
    if (p3 != m3) eps = p3 ? 1 : -1;
  }
  if (eps == 0) throw Error(ErrorKind::sign, "could not determine the functional-equation sign of " + f.label);
  if (f.eps != 0 && f.eps != eps)
    throw Error(ErrorKind::sign, "functional-equation sign disagrees with the recorded sign of " + f.label);
  LValue out;
  out.eps = eps;
  out.completed = x.head + eps * x.tail;
  out.split_gap = gap(x, y, eps);
  out.value = completed_to_l(f, s, out.completed, prec);
  out.terms = x.terms;
  return out;
}

/// L(f, s) with a given sign and split parameter, for invariance checks.
inline Real l_value_at_split(const ModularForm& f, int s, int prec, const Rational& t, int eps) {
  PrecisionScope scope(working_digits(prec));
  const auto a = expand_coefficients(f, l_value_cutoff(f, prec, t));
  const SplitSums x = split_sums(f, a, s, prec, t);
  return completed_to_l(f, s, x.head + eps * x.tail, prec);
}

// ---------------------------------------------------------------------------
// Archimedean factors.

/// Gamma_C(s - shift)^mult when complex, Gamma_R(s - shift)^mult otherwise.
struct GammaFactor {
  bool complex;
  int shift;
  int mult;
};

struct GammaFactors {
  std::vector<GammaFactor> factors;

  std::string str() const {
    std::string out;
    for (const auto& g : factors) {
      if (!out.empty()) out += " * ";
      out += g.complex ? "Gamma_C(s" : "Gamma_R(s";
      if (g.shift > 0) out += "-" + std::to_string(g.shift);
      if (g.shift < 0) out += "+" + std::to_string(-g.shift);
      out += ")";
      if (g.mult != 1) out += "^" + std::to_string(g.mult);
    }
    return out.empty() ? "1" : out;
  }

  /// Value at s, or nullopt at a pole.
  std::optional<Real> eval(const Real& s, int prec) const {
    const int wp = working_digits(prec);
    PrecisionScope scope(wp);
    const Real pi = constants(wp).pi;
    Real v(1);
    for (const auto& g : factors) {
      Real z = s - g.shift;
      Real arg = g.complex ? z : Real(z / 2);
      if (arg <= 0 && boost::multiprecision::floor(arg) == arg) return std::nullopt;
      Real gm;
      mpfr_gamma(gm.backend().data(), arg.backend().data(), MPFR_RNDN);
      Real f = g.complex ? Real(2 * boost::multiprecision::pow(2 * pi, -z) * gm) : Real(boost::multiprecision::pow(pi, -z / 2) * gm);
      v *= boost::multiprecision::pow(f, g.mult);
    }
    return v;
  }
};

/// prod_{p<q} Gamma_C(s - p)^{h^{p,q}}, times Gamma_R(s - p)^{h+} Gamma_R(s - p + 1)^{h-}
/// on H^{p,p} in even weight.
inline GammaFactors gamma_factors(const std::vector<HodgeNumber>& hodge, int w, std::optional<MiddleSplit> middle = std::nullopt) {
  GammaFactors out;
  for (const auto& e : hodge) {
    if (e.h == 0) continue;
    if (e.p + e.q != w) throw Error(ErrorKind::usage, "Hodge number does not have weight " + std::to_string(w));
    bool sym = false;
    for (const auto& o : hodge)
      if (o.p == e.q && o.q == e.p && o.h == e.h) sym = true;
    if (!sym) throw Error(ErrorKind::usage, "Hodge numbers are not symmetric");
  }
  for (const auto& e : hodge) {
    if (e.h == 0 || e.p >= e.q) continue;
    out.factors.push_back({true, e.p, e.h});
  }
  if (w % 2 == 0) {
    for (const auto& e : hodge) {
      if (e.h == 0 || e.p != e.q) continue;
      if (!middle) throw Error(ErrorKind::insufficient_data, "even weight needs the F_infinity split of H^{p,p}");
      if (middle->plus + middle->minus != e.h) throw Error(ErrorKind::usage, "split does not add up to h^{p,p}");
      if (middle->plus) out.factors.push_back({false, e.p, middle->plus});
      if (middle->minus) out.factors.push_back({false, e.p - 1, middle->minus});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// j-invariant.

/// j = E4^3 / Delta with Delta = q prod (1 - q^n)^24, summed in q = e^{2 pi i tau}.
inline Complex j_invariant(const Complex& tau, int prec) {
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  if (!(tau.im > 0)) throw Error(ErrorKind::usage, "tau must lie in the upper half plane");
  const auto& c = constants(wp);
  const Complex q = exp(c.two_pi_i * tau);
  const Real aq = abs(q);
  if (!(aq < Real(0.5))) throw Error(ErrorKind::convergence, "|q| >= 1/2; move tau higher in the upper half plane");
  const double lq = -boost::multiprecision::log10(aq).convert_to<double>();
  const long terms = static_cast<long>(std::ceil((wp + 10) / lq)) + 8;

  std::vector<Complex> qp(static_cast<std::size_t>(terms) + 1);
  qp[0] = Complex(1);
  for (long n = 1; n <= terms; ++n) qp[n] = qp[n - 1] * q;

  Complex e4(1);
  for (long n = 1; n <= terms; ++n) e4 += qp[n] * to_real(Integer(240 * divisor_sigma(n, 3)));

  // prod (1 - q^n) = sum_k (-1)^k q^{k(3k-1)/2}, k over all integers.
  Complex eta(1);
  for (long k = 1;; ++k) {
    const long e1 = k * (3 * k - 1) / 2, e2 = k * (3 * k + 1) / 2;
    if (e1 > terms) break;
    Complex t = qp[e1];
    if (e2 <= terms) t += qp[e2];
    eta += (k % 2 == 0) ? t : -t;
  }
  const Complex delta = q * pow(eta, 24);
  return pow(e4, 3) / delta;
}

/// The imaginary part of tau_perp as printed to 50 digits.
inline const char* kVPerpReference = "0.37369955695472976699767292752499463211766555651682";

/// v with j(1/2 + i v) = (215/28)^3, Newton-refined from the 50-digit value
/// so that it can be used beyond 50 digits.
inline Real v_perp(int prec) {
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const Real target = boost::multiprecision::pow(Real(215) / 28, 3);
  auto g = [&](const Real& v) { return j_invariant(Complex(Real(0.5), v), prec).re - target; };
  Real v(kVPerpReference);
  Real h = pow10(-wp / 2);
  for (int it = 0; it < 8; ++it) {
    Real gv = g(v);
    Real d = (g(v + h) - g(v - h)) / (2 * h);
    Real step = gv / d;
    v -= step;
    if (boost::multiprecision::abs(step) < pow10(-wp + 2)) break;
  }
  return v;
}

}  // namespace periodlab
