#pragma once

// Prepotential data and the matrix S taking canonical periods to the
// integral symplectic period vector.

#include <fstream>
#include <istream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include "periodlab/pf_core.hpp"

namespace periodlab {

/// zeta(3) from the Apery-type series (5/2) sum (-1)^(n+1) / (n^3 C(2n, n)).
inline Real zeta3(int prec) {
  const int wp = prec + 10;
  PrecisionScope scope(wp);
  Real sum(0);
  Real central(2);  // C(2n, n) for n = 1
  const Real eps = pow10(-wp);
  for (long n = 1;; ++n) {
    if (n > 1) central = central * Real(2 * (2 * n - 1)) / Real(n);
    Real term = 1 / (Real(n) * Real(n) * Real(n) * central);
    sum += (n % 2 == 1) ? term : Real(-term);
    if (term < eps) break;
  }
  return sum * 5 / 2;
}

/// -3 chi zeta(3) / (2 pi i)^3.
inline Complex y000_from_euler(const Integer& chi, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& c = constants(working_digits(prec));
  return Complex(zeta3(working_digits(prec)) * to_real(Integer(-3 * chi))) / c.two_pi_i_pow[3];
}

/// Y000 in the form a + b * zeta(3) / (2 pi i)^3.
struct Y000Form {
  Rational a;
  Rational b;

  Complex value(int prec) const {
    PrecisionScope scope(working_digits(prec));
    const auto& c = constants(working_digits(prec));
    return Complex(Real(a)) + Complex(zeta3(working_digits(prec)) * Real(b)) / c.two_pi_i_pow[3];
  }
};

struct MirrorData {
  Integer Y111;
  Rational Y011;
  Rational Y001;
  Y000Form Y000;
  std::optional<Integer> euler;
  Rational lambda{1};
  std::optional<int> k;

  Complex y000(int prec) const { return Y000.value(prec); }
};

inline void validate(const MirrorData& md) {
  if (md.Y111 <= 0) throw Error(ErrorKind::parse, "Y111 must be a positive integer");
  if (md.lambda == 0) throw Error(ErrorKind::parse, "lambda must be nonzero");
  if (md.euler && (md.Y000.a != 0 || md.Y000.b != Rational(-3 * *md.euler)))
    throw Error(ErrorKind::inconsistency, "Y000 disagrees with -3 chi zeta(3)/(2 pi i)^3");
}

/// The data for the AESZ34 pair, k = 1 or 2.
inline MirrorData aesz34_mirror(int k) {
  MirrorData md;
  md.Y111 = 12 * k;
  md.Y011 = 0;
  md.Y001 = -k;
  md.Y000 = {Rational(0), Rational(24 * k)};
  md.lambda = 1;
  md.k = k;
  return md;
}

inline Y000Form parse_y000(const std::string& text) {
  static const std::regex zeta_form(R"(^\s*([-+]?[0-9./]+)\s*\*\s*zeta3\s*/\s*\(\s*2\s*\*\s*pi\s*\*\s*i\s*\)\s*\^\s*3\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, zeta_form)) return {Rational(0), parse_rational(m[1].str())};
  return {parse_rational(text), Rational(0)};
}

/// Key-value lines: Y111, Y011, Y001, Y000, lambda, and optionally euler, k.
inline MirrorData parse_mirror(std::istream& in) {
  MirrorData md;
  bool have111 = false, have000 = false;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::strip_comment(raw);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    auto b = rest.find_first_not_of(" \t");
    rest = b == std::string::npos ? "" : rest.substr(b);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t' || rest.back() == '\r')) rest.pop_back();
    if (rest.empty()) throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": missing value for " + key);
    try {
      if (key == "Y111") {
        Rational v = parse_rational(rest);
        if (boost::multiprecision::denominator(v) != 1) throw Error(ErrorKind::parse, "Y111 must be an integer");
        md.Y111 = boost::multiprecision::numerator(v);
        have111 = true;
      } else if (key == "Y011") {
        md.Y011 = parse_rational(rest);
      } else if (key == "Y001") {
        md.Y001 = parse_rational(rest);
      } else if (key == "Y000") {
        md.Y000 = parse_y000(rest);
        have000 = true;
      } else if (key == "euler") {
        md.euler = parse_integer(rest);
      } else if (key == "lambda") {
        md.lambda = parse_rational(rest);
      } else if (key == "k") {
        md.k = std::stoi(rest);
      } else {
        throw Error(ErrorKind::parse, "unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": bad value '" + rest + "'");
    }
  }
  if (!have111) throw Error(ErrorKind::parse, "mirror data lacks Y111");
  if (!have000) {
    if (!md.euler) throw Error(ErrorKind::parse, "mirror data needs Y000 or euler");
    md.Y000 = {Rational(0), Rational(-3 * *md.euler)};
  }
  validate(md);
  return md;
}

inline MirrorData parse_mirror(const std::string& text) {
  std::istringstream in(text);
  return parse_mirror(in);
}

inline MirrorData read_mirror_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::parse, "cannot open mirror file " + file);
  return parse_mirror(in);
}

struct SMatrix {
  Mat4<Complex> s;
  Rational lambda_used;
};

inline SMatrix build_S(const MirrorData& md, int prec) {
  if (md.lambda == 0) throw Error(ErrorKind::usage, "lambda must be nonzero");
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  const Complex scale = constants(wp).two_pi_i_pow[3] * to_real(md.lambda);
  const Complex y000 = md.y000(prec);
  Mat4<Complex> m;
  const Rational y001_half = -md.Y001 / 2;
  const Rational y011 = -md.Y011;
  const Rational y111_sixth = Rational(md.Y111) / 6;
  const Rational y111_half = -Rational(md.Y111) / 2;
  m[0] = {-y000 / Real(3), Complex(y001_half), Complex(0), Complex(y111_sixth)};
  m[1] = {Complex(y001_half), Complex(y011), Complex(y111_half), Complex(0)};
  m[2] = {Complex(1), Complex(0), Complex(0), Complex(0)};
  m[3] = {Complex(0), Complex(1), Complex(0), Complex(0)};
  for (auto& row : m)
    for (auto& x : row) x = x * scale;
  return {m, md.lambda};
}

/// t = w1 / w0 on the branch carried by `at`.
inline Complex mirror_map(const CanonicalBasis& basis, const BranchedPoint& at, int prec) {
  PrecisionScope scope(working_digits(prec));
  StateMatrix w = eval_canonical(basis, at, prec);
  if (is_zero(w.w[0][0])) throw Error(ErrorKind::division, "w0 vanishes");
  return w.w[1][0] / w.w[0][0];
}

}  // namespace periodlab
