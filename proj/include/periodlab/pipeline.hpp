#pragma once

// End-to-end check of the Deligne period relations for a one-parameter
// family: transport to the target fibre, F_infinity, c+ and c-, L-values and
// recognition of the two ratios.

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "periodlab/deligne.hpp"
#include "periodlab/lfunc.hpp"

namespace periodlab {

struct PipelineInput {
  Operator op;
  MirrorData mirror;
  ModularForm f2;  // weight 2, the L(f2, 1) factor
  ModularForm f4;  // weight 4, the L(f4, 1) and L(f4, 2) factors
  Rational base{-1, 50};
  Rational target{-1, 7};
  std::optional<PathPlan> path;  // overrides the planned path
  int prec = 100;
};

struct RecognizedRatio {
  Complex value;
  std::optional<RecognizedRational> rational;
  int digits = 0;  // digits of agreement with the recognized rational
};

struct DeligneReport {
  int prec = 0;
  std::optional<int> k;
  Rational base, target;
  PathPlan path;
  int steps = 0;
  Real min_abs_det;
  Involution finf;
  EigenBases bases;
  Complex c_plus;   // twisted by n = 2
  Complex c_minus;
  Complex c_plus_norm;
  Complex c_minus_norm;
  Real l_f2_1, l_f4_1, l_f4_2;
  int eps_f2 = 0, eps_f4 = 0;
  Real v_perp;
  RecognizedRatio ratio_plus;   // c+_norm / (L(f2,1) L(f4,2))
  RecognizedRatio ratio_minus;  // c-_norm v_perp / (pi^3 L(f4,1) L(f2,1))
  RecognizedRatio ratio_minus_pi_inverse;  // the same with pi^-3 in place of pi^3

  bool verified() const { return ratio_plus.rational.has_value() && ratio_minus.rational.has_value(); }
};

namespace detail {

inline RecognizedRatio recognize_ratio(const Complex& z, int prec) {
  RecognizedRatio r;
  r.value = z;
  r.rational = recognize_rational(z, default_max_height(), default_tolerance(prec));
  if (r.rational) r.digits = std::min(digits_agreement(z.re, Real(r.rational->value())), prec);
  return r;
}

}  // namespace detail

/// Runs the full chain. Errors carry the failing stage in their message.
inline DeligneReport run_pipeline(const PipelineInput& in) {
  if (in.prec < 30) throw Error(ErrorKind::usage, "precision must be at least 30 digits");
  const int prec = in.prec;
  const int wp = working_digits(prec);
  PrecisionScope scope(wp);
  auto stage = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw Error(e.kind(), std::string(name) + ": " + e.what());
    }
  };

  DeligneReport rep;
  rep.prec = prec;
  rep.k = in.mirror.k;
  rep.base = in.base;
  rep.target = in.target;

  const auto singular = finite_singular_values(in.op, wp);
  rep.path = stage("path", [&] {
    if (in.path) {
      if (abs(in.path->start() - Complex(in.base)) > pow10(-prec) || abs(in.path->end() - Complex(in.target)) > pow10(-prec))
        throw Error(ErrorKind::usage, "path must run from the base point to the target");
      return *in.path;
    }
    return plan_path(Complex(in.base), Complex(in.target), singular, default_clearance(Complex(in.base), Complex(in.target), singular));
  });
  TransportTrace tr = stage("transport", [&] { return transport_traced(in.op, rep.path, prec); });
  rep.steps = tr.steps;
  rep.min_abs_det = tr.min_abs_det;
  const StateMatrix& W = tr.state;

  const SMatrix S = stage("mirror", [&] { return build_S(in.mirror, prec); });
  rep.finf = stage("f_infinity", [&] { return f_infinity(S, W, prec); });
  rep.bases = stage("eigenspaces", [&] { return eigenspace_bases(rep.finf); });
  rep.c_plus = tate_twist(c_plus(S, W, rep.bases, prec), 2, prec);
  rep.c_minus = c_minus(S, W, rep.bases, prec);
  rep.c_plus_norm = normalized_c_plus_paper(W, prec);
  rep.c_minus_norm = normalized_c_minus_paper(W, in.mirror, prec);

  stage("lfunc", [&] {
    auto a = l_value(in.f2, 1, prec);
    auto b = l_value(in.f4, 1, prec);
    auto c = l_value(in.f4, 2, prec);
    rep.l_f2_1 = a.value;
    rep.l_f4_1 = b.value;
    rep.l_f4_2 = c.value;
    rep.eps_f2 = a.eps;
    rep.eps_f4 = c.eps;
    rep.v_perp = v_perp(prec);
    return 0;
  });

  const Real pi3 = boost::multiprecision::pow(constants(wp).pi, 3);
  const Real lm = rep.l_f4_1 * rep.l_f2_1;
  rep.ratio_plus = detail::recognize_ratio(rep.c_plus_norm / (rep.l_f2_1 * rep.l_f4_2), prec);
  rep.ratio_minus = detail::recognize_ratio(rep.c_minus_norm * rep.v_perp / (pi3 * lm), prec);
  rep.ratio_minus_pi_inverse = detail::recognize_ratio(rep.c_minus_norm * rep.v_perp * pi3 / lm, prec);
  return rep;
}

// ---------------------------------------------------------------------------
// Output. Keys are listed in docs/report-schema.md.

namespace detail {

inline std::string vec_str(const IntVec4& v) {
  std::ostringstream os;
  for (int i = 0; i < 4; ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

inline void put_ratio(std::vector<std::pair<std::string, std::string>>& kv, const std::string& key, const RecognizedRatio& r,
                      int digits) {
  kv.emplace_back(key + "_re", format_real(r.value.re, digits));
  kv.emplace_back(key + "_im", format_real(r.value.im, 6));
  kv.emplace_back(key, r.rational ? r.rational->str() : "unrecognized");
  if (r.rational) {
    kv.emplace_back(key + "_num", r.rational->num.str());
    kv.emplace_back(key + "_den", r.rational->den.str());
    kv.emplace_back(key + "_residual", format_real(r.rational->residual, 6));
    kv.emplace_back(key + "_digits", std::to_string(r.digits));
  }
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> report_fields(const DeligneReport& r) {
  std::vector<std::pair<std::string, std::string>> kv;
  const int d = r.prec;
  auto cplx = [&](const std::string& key, const Complex& z) {
    kv.emplace_back(key + "_re", format_real(z.re, d));
    kv.emplace_back(key + "_im", format_real(z.im, d));
  };
  kv.emplace_back("prec", std::to_string(r.prec));
  if (r.k) kv.emplace_back("k", std::to_string(*r.k));
  kv.emplace_back("base", format_rational(r.base));
  kv.emplace_back("target", format_rational(r.target));
  kv.emplace_back("path_segments", std::to_string(r.path.segment_count()));
  kv.emplace_back("transport_steps", std::to_string(r.steps));
  kv.emplace_back("min_abs_wronskian", format_real(r.min_abs_det, 6));
  if (r.finf.exact) {
    for (int i = 0; i < 4; ++i) {
      std::ostringstream os;
      for (int j = 0; j < 4; ++j) os << (j ? " " : "") << format_rational((*r.finf.exact)[i][j]);
      kv.emplace_back("f_infinity_row" + std::to_string(i), os.str());
    }
    kv.emplace_back("f_infinity_residual", format_real(r.finf.residual, 6));
  }
  kv.emplace_back("eigen_plus", detail::vec_str(r.bases.plus[0]) + ";" + detail::vec_str(r.bases.plus[1]));
  kv.emplace_back("eigen_minus", detail::vec_str(r.bases.minus[0]) + ";" + detail::vec_str(r.bases.minus[1]));
  cplx("c_plus", r.c_plus);
  cplx("c_minus", r.c_minus);
  cplx("c_plus_norm", r.c_plus_norm);
  cplx("c_minus_norm", r.c_minus_norm);
  kv.emplace_back("l_f2_1", format_real(r.l_f2_1, d));
  kv.emplace_back("l_f4_1", format_real(r.l_f4_1, d));
  kv.emplace_back("l_f4_2", format_real(r.l_f4_2, d));
  kv.emplace_back("eps_f2", std::to_string(r.eps_f2));
  kv.emplace_back("eps_f4", std::to_string(r.eps_f4));
  kv.emplace_back("v_perp", format_real(r.v_perp, d));
  detail::put_ratio(kv, "ratio_plus", r.ratio_plus, d);
  detail::put_ratio(kv, "ratio_minus", r.ratio_minus, d);
  detail::put_ratio(kv, "ratio_minus_pi_inverse", r.ratio_minus_pi_inverse, d);
  kv.emplace_back("verified", r.verified() ? "yes" : "no");
  return kv;
}

inline void write_kv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& kv) {
  for (const auto& [k, v] : kv) os << k << ' ' << v << '\n';
}

inline void write_text(std::ostream& os, const DeligneReport& r) {
  os << "Deligne period check at phi = " << format_rational(r.target);
  if (r.k) os << " (k = " << *r.k << ")";
  os << ", " << r.prec << " digits\n";
  if (r.finf.exact) {
    os << "  F_infinity:\n";
    for (int i = 0; i < 4; ++i) {
      os << "   ";
      for (int j = 0; j < 4; ++j) os << ' ' << std::setw(4) << format_rational((*r.finf.exact)[i][j]);
      os << '\n';
    }
  }
  os << "  L(f2,1) = " << format_real(r.l_f2_1, 30) << '\n';
  os << "  L(f4,1) = " << format_real(r.l_f4_1, 30) << '\n';
  os << "  L(f4,2) = " << format_real(r.l_f4_2, 30) << '\n';
  auto line = [&](const char* name, const RecognizedRatio& x) {
    os << "  " << name << " = ";
    if (x.rational)
      os << x.rational->str() << "  (" << x.digits << " digits)\n";
    else
      os << "not recognized, value " << format_real(x.value.re, 30) << '\n';
  };
  line("ratio_plus", r.ratio_plus);
  line("ratio_minus", r.ratio_minus);
  line("ratio_minus with pi^-3", r.ratio_minus_pi_inverse);
  os << (r.verified() ? "verified\n" : "not verified\n");
}

}  // namespace periodlab
