#pragma once

#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "periodlab.hpp"

namespace periodlab::testing {

inline std::string data_path(const std::string& name) { return std::string(PERIODLAB_DATA_DIR) + "/" + name; }

inline const Operator& aesz34() {
  static const Operator op = [] {
    std::ifstream in(data_path("aesz34.op"));
    return parse_operator(in);
  }();
  return op;
}

inline const std::vector<Complex>& aesz34_singular(int prec) {
  static std::map<int, std::vector<Complex>> cache;
  auto it = cache.find(prec);
  if (it == cache.end()) it = cache.emplace(prec, finite_singular_values(aesz34(), working_digits(prec))).first;
  return it->second;
}

/// Wronskian at -1/7 transported from -1/50 along the real axis, computed once
/// per precision.
inline const StateMatrix& wronskian_at_minus_seventh(int prec) {
  static std::map<int, StateMatrix> cache;
  auto it = cache.find(prec);
  if (it == cache.end()) {
    PrecisionScope scope(working_digits(prec));
    PathPlan path;
    path.waypoints = {Complex(Rational(-1, 50)), Complex(Rational(-1, 7))};
    it = cache.emplace(prec, transport_traced(aesz34(), path, prec).state).first;
  }
  return it->second;
}

/// Wronskian from the series at a point inside the disc around 0.
inline StateMatrix series_wronskian(const Rational& at, int prec) {
  PrecisionScope scope(working_digits(prec));
  const BranchedPoint p = BranchedPoint::principal(at);
  return eval_canonical(frobenius_for(aesz34(), p, prec), p, prec);
}

inline Mat4<Rational> rational_matrix(std::initializer_list<std::initializer_list<long>> rows) {
  Mat4<Rational> m;
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (long v : r) m[i][j++] = v;
    ++i;
  }
  return m;
}

inline ::testing::AssertionResult below(const Real& x, const Real& bound) {
  if (x < bound) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << x.str(6, std::ios_base::scientific) << " is not below "
                                       << bound.str(6, std::ios_base::scientific);
}

template <class F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorKind::usage;
}

}  // namespace periodlab::testing
