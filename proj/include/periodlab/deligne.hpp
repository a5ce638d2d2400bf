#pragma once

// Real structure on H^3: the involution F_infinity, its eigenspaces, and the
// determinants of period pairings that define c+ and c-.

#include <algorithm>
#include <optional>
#include <set>
#include <vector>

#include "periodlab/continuation.hpp"
#include "periodlab/exact_linalg.hpp"
#include "periodlab/mirror.hpp"
#include "periodlab/recognition.hpp"

namespace periodlab {

using IntVec4 = std::array<Integer, 4>;

/// Intersection form in the basis (beta0, beta1, alpha0, alpha1).
inline Mat4<Integer> gram_matrix() {
  Mat4<Integer> s;
  for (auto& row : s) row.fill(Integer(0));
  s[0][2] = -1;
  s[1][3] = -1;
  s[2][0] = 1;
  s[3][1] = 1;
  return s;
}

struct Involution {
  Mat4<Complex> numeric;
  std::optional<Mat4<Rational>> exact;
  Real residual;  // max |numeric - exact|, meaningful when exact is set
};

/// S W conj(W)^-1 conj(S)^-1, rationalized entrywise when possible. A
/// rationalized matrix that is not an involution means the branch or path was
/// wrong, and is an error rather than a flag.
inline Involution f_infinity(const SMatrix& S, const StateMatrix& W, int prec) {
  PrecisionScope scope(working_digits(prec));
  if (is_zero(det(W.w))) throw Error(ErrorKind::division, "Wronskian is singular");
  Involution f;
  f.numeric = S.s * W.w * inverse(conj(W.w)) * inverse(conj(S.s));
  const Real tol = default_tolerance(prec);
  Mat4<Rational> q;
  Real res(0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      auto r = recognize_rational(f.numeric[i][j], default_max_height(), tol);
      if (!r) return f;
      q[i][j] = r->value();
      res = boost::multiprecision::max(res, r->residual);
    }
  }
  if (q * q != identity4<Rational>())
    throw Error(ErrorKind::inconsistency, "rationalized F_infinity does not square to the identity");
  f.exact = q;
  f.residual = res;
  return f;
}

struct EigenBases {
  std::array<IntVec4, 2> plus;
  std::array<IntVec4, 2> minus;
};

namespace detail {

inline std::array<IntVec4, 2> eigenbasis(const Mat4<Rational>& f, int sign) {
  exact::Matrix a(4, exact::Row(4));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = f[i][j] - Rational(i == j ? sign : 0);
  auto null = exact::nullspace(a, 4);
  if (null.size() != 2) throw Error(ErrorKind::non_involution, "eigenspace does not have dimension 2");
  std::array<IntVec4, 2> out;
  for (int k = 0; k < 2; ++k) {
    auto v = exact::primitive(null[k]);
    std::copy(v.begin(), v.end(), out[k].begin());
  }
  // Plus vectors in decreasing, minus vectors in increasing lexicographic order.
  if ((sign > 0) == (out[0] < out[1])) std::swap(out[0], out[1]);
  return out;
}

}  // namespace detail

/// Primitive integer bases of ker(F - 1) and ker(F + 1). Each null vector has
/// its free coordinate set to 1 before scaling, so the result is
/// deterministic.
inline EigenBases eigenspace_bases(const Mat4<Rational>& f) {
  if (f * f != identity4<Rational>()) throw Error(ErrorKind::non_involution, "matrix is not an involution");
  return {detail::eigenbasis(f, 1), detail::eigenbasis(f, -1)};
}

inline EigenBases eigenspace_bases(const Involution& f) {
  if (!f.exact) throw Error(ErrorKind::non_involution, "F_infinity was not rationalized");
  return eigenspace_bases(*f.exact);
}

/// Coefficients of the n-th phi-derivative of Omega in the beta basis: S times
/// column n of W.
inline std::array<Complex, 4> omega_coefficients(const SMatrix& S, const StateMatrix& W, int n) {
  std::array<Complex, 4> u;
  for (int i = 0; i < 4; ++i) {
    Complex s(0);
    for (int j = 0; j < 4; ++j) s += S.s[i][j] * W.w[j][n];
    u[i] = s;
  }
  return u;
}

/// (2 pi i)^-3 u^T Sigma gamma.
inline Complex pair(const std::array<Complex, 4>& u, const IntVec4& gamma, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto sigma = gram_matrix();
  Complex s(0);
  for (int i = 0; i < 4; ++i) {
    Integer c(0);
    for (int j = 0; j < 4; ++j) c += sigma[i][j] * gamma[j];
    if (c != 0) s += u[i] * to_real(c);
  }
  return s / constants(working_digits(prec)).two_pi_i_pow[3];
}

/// det [ <Omega^(r), gamma_s> ]_{r, s in {0, 1}}.
inline Complex period_determinant(const SMatrix& S, const StateMatrix& W, const std::array<IntVec4, 2>& basis, int prec) {
  PrecisionScope scope(working_digits(prec));
  auto u0 = omega_coefficients(S, W, 0);
  auto u1 = omega_coefficients(S, W, 1);
  return pair(u0, basis[0], prec) * pair(u1, basis[1], prec) - pair(u0, basis[1], prec) * pair(u1, basis[0], prec);
}

inline Complex c_plus(const SMatrix& S, const StateMatrix& W, const EigenBases& b, int prec) {
  return period_determinant(S, W, b.plus, prec);
}

inline Complex c_minus(const SMatrix& S, const StateMatrix& W, const EigenBases& b, int prec) {
  return period_determinant(S, W, b.minus, prec);
}

/// Multiplies by (2 pi i)^(2n).
inline Complex tate_twist(const Complex& c, int n, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& k = constants(working_digits(prec));
  Complex f = pow(k.two_pi_i, static_cast<unsigned>(std::abs(2 * n)));
  return n >= 0 ? c * f : c / f;
}

// ---------------------------------------------------------------------------
// Criticality.

struct HodgeNumber {
  int p;
  int q;
  int h;
};

/// Hodge numbers h^{w,0}, h^{w-1,1}, ..., h^{0,w} of a weight-w structure.
inline std::vector<HodgeNumber> hodge_diamond_row(int w, const std::vector<int>& numbers) {
  if (static_cast<int>(numbers.size()) != w + 1) throw Error(ErrorKind::usage, "expected w + 1 Hodge numbers");
  std::vector<HodgeNumber> out;
  for (int i = 0; i <= w; ++i) out.push_back({w - i, i, numbers[i]});
  return out;
}

/// Dimensions of the +1 and -1 eigenspaces of F_infinity on H^{w/2, w/2}.
struct MiddleSplit {
  int plus;
  int minus;
};

/// Twists n for which the twisted structure (p - n, q - n) is critical.
/// Only n in [-window, window] are examined; pure Tate pieces are critical
/// for infinitely many n.
inline std::set<int> critical_twists(const std::vector<HodgeNumber>& hodge, std::optional<MiddleSplit> middle = std::nullopt,
                                     int window = 32) {
  std::set<int> out;
  std::vector<HodgeNumber> nz;
  for (const auto& e : hodge)
    if (e.h != 0) nz.push_back(e);
  if (nz.empty()) return out;
  const int w = nz.front().p + nz.front().q;
  for (const auto& e : nz)
    if (e.p + e.q != w) throw Error(ErrorKind::usage, "Hodge numbers of mixed weight");
  bool has_middle = false;
  for (const auto& e : nz)
    if (e.p == e.q) has_middle = true;
  if (has_middle && !middle)
    throw Error(ErrorKind::insufficient_data, "even weight needs the F_infinity split of the middle Hodge piece");
  for (int n = -window; n <= window; ++n) {
    bool ok = true;
    for (const auto& e : nz) {
      const int p = e.p - n;
      const int q = e.q - n;
      if (p != q) {
        if (!((p <= -1 && q >= 0) || (p >= 0 && q <= -1))) ok = false;
      } else {
        // Twisting by n multiplies the action of F_infinity by (-1)^n.
        const int plus = n % 2 == 0 ? middle->plus : middle->minus;
        const int minus = n % 2 == 0 ? middle->minus : middle->plus;
        if (p < 0 ? minus != 0 : plus != 0) ok = false;
      }
    }
    if (ok) out.insert(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Closed forms.

/// pi^4 det [[w0, -w1 + w2], [w0', -w1' + w2']].
inline Complex normalized_c_plus_paper(const StateMatrix& W, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& w = W.w;
  Complex a0 = w[0][0], a1 = w[0][1];
  Complex b0 = w[2][0] - w[1][0], b1 = w[2][1] - w[1][1];
  Real pi4 = boost::multiprecision::pow(constants(working_digits(prec)).pi, 4);
  return (a0 * b1 - a1 * b0) * pi4;
}

/// det [[a w0 - 2 w1 + 12 w2 - 8 w3, -w0 + 2 w1], [same for derivatives]]
/// with a = 16 Y000 / Y111 - 1, which is 32 zeta(3)/(2 pi i)^3 - 1 for the
/// AESZ34 data of either k.
inline Complex normalized_c_minus_paper(const StateMatrix& W, const MirrorData& md, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& w = W.w;
  Complex a = md.y000(prec) * Real(16) / to_real(md.Y111) - Complex(1);
  auto col1 = [&](int m) { return a * w[0][m] - w[1][m] * Real(2) + w[2][m] * Real(12) - w[3][m] * Real(8); };
  auto col2 = [&](int m) { return -w[0][m] + w[1][m] * Real(2); };
  return col1(0) * col2(1) - col1(1) * col2(0);
}

/// 1/2 lambda^2 Y111 (w0 w2' - w2 w0'), valid where F_infinity is the
/// small-positive-phi involution.
inline Complex c_plus_closed_form(const StateMatrix& W, const MirrorData& md, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& w = W.w;
  const Rational f = md.lambda * md.lambda * Rational(md.Y111) / 2;
  return (w[0][0] * w[2][1] - w[2][0] * w[0][1]) * to_real(f);
}

/// lambda^2 Y111 / 6 [(2 Y000/Y111 w0 - w3) w1' - (2 Y000/Y111 w0' - w3') w1].
inline Complex c_minus_closed_form(const StateMatrix& W, const MirrorData& md, int prec) {
  PrecisionScope scope(working_digits(prec));
  const auto& w = W.w;
  const Complex y = md.y000(prec) * Real(2) / to_real(md.Y111);
  const Rational f = md.lambda * md.lambda * Rational(md.Y111) / 6;
  return ((y * w[0][0] - w[3][0]) * w[1][1] - (y * w[0][1] - w[3][1]) * w[1][0]) * to_real(f);
}

}  // namespace periodlab
