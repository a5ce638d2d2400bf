#include <random>

#include "support.hpp"

using namespace periodlab;
using namespace periodlab::testing;

namespace {

// Independent oracle: sum over compositions i+j+k+l+m = n of the squared
// multinomial coefficient, by direct enumeration.
Integer multinomial_sum(int n) {
  std::vector<Integer> fact(static_cast<std::size_t>(n) + 1, Integer(1));
  for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  Integer total(0);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j)
      for (int k = 0; i + j + k <= n; ++k)
        for (int l = 0; i + j + k + l <= n; ++l) {
          const int m = n - i - j - k - l;
          Integer c = fact[n] / (fact[i] * fact[j] * fact[k] * fact[l] * fact[m]);
          total += c * c;
        }
  return total;
}

// Polynomials in phi with coefficients in Q, indexed by the power of log(phi).
using LogSeries = std::vector<std::vector<Rational>>;

LogSeries apply_theta(const LogSeries& y) {
  LogSeries out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) {
    out[j].resize(y[j].size());
    for (std::size_t m = 0; m < y[j].size(); ++m) out[j][m] += y[j][m] * static_cast<long>(m);
  }
  for (std::size_t j = 1; j < y.size(); ++j)
    for (std::size_t m = 0; m < y[j].size(); ++m) out[j - 1][m] += y[j][m] * static_cast<long>(j);
  return out;
}

LogSeries apply_operator(const Operator& op, const LogSeries& y) {
  const std::size_t len = y[0].size() + static_cast<std::size_t>(op.phi_degree());
  LogSeries out(y.size(), std::vector<Rational>(len));
  LogSeries th = y;
  for (int j = 0; j <= 4; ++j) {
    for (int i = 0; i <= op.phi_degree(); ++i) {
      if (op.at(i, j) == 0) continue;
      for (std::size_t l = 0; l < th.size(); ++l)
        for (std::size_t m = 0; m < th[l].size(); ++m) out[l][m + i] += th[l][m] * op.at(i, j);
    }
    th = apply_theta(th);
  }
  return out;
}

// sum_j C(k, j) f_{k-j} log^j, without the (2 pi i)^-k prefactor.
LogSeries log_solution(const CanonicalBasis& b, int k) {
  LogSeries y(static_cast<std::size_t>(k) + 1);
  for (int j = 0; j <= k; ++j) {
    y[j] = b.f[static_cast<std::size_t>(k - j)];
    for (auto& c : y[j]) c *= Rational(binomial(static_cast<unsigned>(k), static_cast<unsigned>(j)));
  }
  return y;
}

}  // namespace

TEST(PfCore, ParsesBundledOperator) {
  const Operator& op = aesz34();
  EXPECT_EQ(op.name, "AESZ34");
  EXPECT_EQ(op.at(0, 4), 1);
  EXPECT_EQ(op.at(1, 4), -35);
  EXPECT_EQ(op.at(1, 0), -5);
  EXPECT_EQ(op.phi_degree(), 3);
}

TEST(PfCore, DegreeTwoRowIsExpandedProduct) {
  // (theta + 1)^2 (259 theta^2 + 518 theta + 285)
  IntPoly expected = poly_mul(IntPoly{1, 2, 1}, IntPoly{285, 518, 259});
  EXPECT_EQ(aesz34().theta_poly(2), expected);
  EXPECT_EQ(expected, (IntPoly{285, 1088, 1580, 1036, 259}));
  // -225 (theta + 1)^2 (theta + 2)^2
  IntPoly row3 = poly_mul(poly_mul(IntPoly{1, 2, 1}, IntPoly{4, 4, 1}), IntPoly{-225});
  EXPECT_EQ(aesz34().theta_poly(3), row3);
  EXPECT_EQ(aesz34().theta_poly(1), (IntPoly{-5, -28, -63, -70, -35}));
}

TEST(PfCore, SerializeRoundTrip) {
  const std::string text = serialize_operator(aesz34());
  const Operator again = parse_operator(text);
  EXPECT_EQ(serialize_operator(again), text);
  EXPECT_EQ(again.coeffs, aesz34().coeffs);
}

TEST(PfCore, ThetaFourAlone) {
  const Operator op = parse_operator(std::string("name t4\nvariable phi\nc 0 4 1\n"));
  EXPECT_EQ(op.phi_degree(), 0);
  for (int j = 0; j < 4; ++j) EXPECT_EQ(op.at(0, j), 0);
  const auto sing = singular_points(op);
  ASSERT_EQ(sing.size(), 2u);
  EXPECT_EQ(sing[0].exact, 0);
  EXPECT_FALSE(sing[1].finite());
}

TEST(PfCore, ParseErrors) {
  auto kind = [](const std::string& text) { return error_kind_of([&] { parse_operator(text); }); };
  EXPECT_EQ(kind("variable phi\nname x\nc 0 4 1\n"), ErrorKind::parse);
  EXPECT_EQ(kind("name x\nvariable phi\nc 0 4 1.5\n"), ErrorKind::parse);
  EXPECT_EQ(kind("name x\nvariable phi\nc 0 4\n"), ErrorKind::parse);
  EXPECT_EQ(kind("name x\nvariable phi\nc 0 3 1\n"), ErrorKind::unsupported_order);
  EXPECT_EQ(kind("name x\nvariable phi\nc 0 5 1\n"), ErrorKind::unsupported_order);
  EXPECT_EQ(kind("name x\nvariable phi\nc 1 4 1\n"), ErrorKind::parse);
  try {
    parse_operator(std::string("name x\nvariable phi\n\nc 0 4 one\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(PfCore, SingularPoints) {
  const auto sing = singular_points(aesz34());
  std::vector<Rational> finite;
  int infinite = 0;
  for (const auto& s : sing) {
    if (!s.finite()) {
      ++infinite;
      continue;
    }
    ASSERT_EQ(s.kind, SingularPoint::Kind::rational);
    finite.push_back(s.exact);
  }
  std::sort(finite.begin(), finite.end());
  EXPECT_EQ(finite, (std::vector<Rational>{0, Rational(1, 25), Rational(1, 9), 1}));
  EXPECT_EQ(infinite, 1);
}

TEST(PfCore, LeadingCoefficientFactors) {
  IntPoly product = poly_mul(poly_mul(IntPoly{1, -1}, IntPoly{1, -9}), IntPoly{1, -25});
  EXPECT_EQ(aesz34().leading(), product);
  EXPECT_EQ(product, (IntPoly{1, -35, 259, -225}));
}

TEST(PfCore, StirlingExamples) {
  EXPECT_EQ(stirling2(2, 1), 1);
  EXPECT_EQ(stirling2(2, 2), 1);
  EXPECT_EQ(stirling2(4, 1), 1);
  EXPECT_EQ(stirling2(4, 2), 7);
  EXPECT_EQ(stirling2(4, 3), 6);
  EXPECT_EQ(stirling2(4, 4), 1);
  const Operator t4 = parse_operator(std::string("name t4\nvariable phi\nc 0 4 1\n"));
  const DOperator d = theta_to_d(t4);
  EXPECT_TRUE(d.p[0].empty());
  EXPECT_EQ(d.p[1], (IntPoly{0, 1}));
  EXPECT_EQ(d.p[2], (IntPoly{0, 0, 7}));
  EXPECT_EQ(d.p[3], (IntPoly{0, 0, 0, 6}));
  EXPECT_EQ(d.p[4], (IntPoly{0, 0, 0, 0, 1}));
}

TEST(PfCore, LeadingDCoefficientIsPhiFourTimesR4) {
  const DOperator d = theta_to_d(aesz34());
  EXPECT_EQ(d.p[4], poly_mul(IntPoly{0, 0, 0, 0, 1}, aesz34().leading()));
}

TEST(PfCore, StirlingConversionOnMonomials) {
  // theta^k phi^m = m^k phi^m; check sum_j S(k, j) m^(j falling) = m^k.
  for (int k = 0; k <= 12; ++k)
    for (int m = 0; m <= 12; ++m) {
      Integer lhs(0);
      for (int j = 0; j <= k; ++j) {
        Integer fall(1);
        for (int t = 0; t < j; ++t) fall *= (m - t);
        lhs += stirling2(k, j) * fall;
      }
      EXPECT_EQ(lhs, boost::multiprecision::pow(Integer(m), static_cast<unsigned>(k))) << k << " " << m;
    }
  const DOperator d = theta_to_d(aesz34());
  for (int m = 0; m <= 12; ++m) {
    IntPoly y(static_cast<std::size_t>(m) + 1, Integer(0));
    y[m] = 1;
    EXPECT_EQ(periodlab::apply(aesz34(), y), periodlab::apply(d, y)) << "phi^" << m;
  }
  IntPoly mixed{3, -1, 4, 1, -5, 9, 2, -6};
  EXPECT_EQ(periodlab::apply(aesz34(), mixed), periodlab::apply(d, mixed));
}

TEST(PfCore, HolomorphicCoefficientExamples) {
  EXPECT_EQ(holomorphic_coefficient(0), 1);
  EXPECT_EQ(holomorphic_coefficient(1), 5);
  EXPECT_EQ(holomorphic_coefficient(2), 45);
}

TEST(PfCore, FrobeniusMatchesMultinomialOracle) {
  const CanonicalBasis b = frobenius_mum(aesz34(), 30);
  ASSERT_EQ(b.f[0].size(), 31u);
  for (int n = 0; n <= 30; ++n) {
    const Integer oracle = multinomial_sum(n);
    EXPECT_EQ(b.f[0][n], Rational(oracle)) << "n = " << n;
    EXPECT_EQ(holomorphic_coefficient(n), oracle) << "n = " << n;
  }
  EXPECT_EQ(b.f[0][3], 545);
}

TEST(PfCore, BoundaryConditions) {
  const CanonicalBasis b = frobenius_mum(aesz34(), 8);
  EXPECT_EQ(b.f[0][0], 1);
  for (int k = 1; k < 4; ++k) EXPECT_EQ(b.f[k][0], 0);
  const CanonicalBasis zero = frobenius_mum(aesz34(), 0);
  ASSERT_EQ(zero.f[0].size(), 1u);
  EXPECT_EQ(zero.f[0][0], 1);
}

TEST(PfCore, RecurrenceResidualVanishes) {
  const CanonicalBasis b = frobenius_mum(aesz34(), 50);
  for (int k = 0; k < 4; ++k) {
    const LogSeries r = apply_operator(aesz34(), log_solution(b, k));
    for (std::size_t l = 0; l < r.size(); ++l)
      for (int m = 0; m <= 46; ++m) EXPECT_EQ(r[l][m], 0) << "k=" << k << " log^" << l << " phi^" << m;
  }
}

TEST(PfCore, RecurrenceResidualRandomTruncations) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> pick(20, 60);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = pick(rng);
    const CanonicalBasis b = frobenius_mum(aesz34(), n);
    const LogSeries r = apply_operator(aesz34(), log_solution(b, 3));
    for (std::size_t l = 0; l < r.size(); ++l)
      for (int m = 0; m <= n - 4; ++m) ASSERT_EQ(r[l][m], 0) << "N=" << n << " log^" << l << " phi^" << m;
  }
}

TEST(PfCore, NotMumRejected) {
  const Operator op = parse_operator(std::string("name bad\nvariable phi\nc 0 4 1\nc 0 2 3\nc 1 0 1\n"));
  EXPECT_EQ(error_kind_of([&] { frobenius_mum(op, 10); }), ErrorKind::not_mum);
}

TEST(PfCore, OutOfDiscAndPrecisionErrors) {
  EXPECT_EQ(error_kind_of([] { frobenius_for(aesz34(), BranchedPoint::principal(Rational(1, 20)), 30); }),
            ErrorKind::out_of_disc);
  EXPECT_EQ(error_kind_of([] {
              PrecisionScope s(working_digits(50));
              eval_canonical(frobenius_mum(aesz34(), 10), BranchedPoint::principal(Rational(1, 30)), 50);
            }),
            ErrorKind::precision);
}

TEST(PfCore, PrincipalBranchAtNegativePoint) {
  PrecisionScope s(working_digits(40));
  const BranchedPoint p = BranchedPoint::principal(Rational(-1, 50));
  EXPECT_TRUE(below(abs(p.log_value.re - boost::multiprecision::log(Real(Rational(1, 50)))), pow10(-40)));
  EXPECT_TRUE(below(abs(p.log_value.im - constants(working_digits(40)).pi), pow10(-40)));
  EXPECT_TRUE(below(abs(exp(p.log_value) - p.value), pow10(-40)));
}

TEST(PfCore, ConjugationSymmetryAtSmallPositivePoint) {
  const int prec = 40;
  PrecisionScope s(working_digits(prec));
  for (const Rational& at : {Rational(1, 100), Rational(1, 64)}) {
    const StateMatrix w = series_wronskian(at, prec);
    Mat4<Complex> vw = w.w;
    for (int m = 0; m < 4; ++m) {
      vw[1][m] = -vw[1][m];
      vw[3][m] = -vw[3][m];
    }
    EXPECT_TRUE(below(max_abs_diff(conj(w.w), vw), pow10(-prec)));
    EXPECT_TRUE(below(abs(w.w[0][0].im), pow10(-prec)));
  }
}

TEST(PfCore, WronskianSatisfiesTheEquation) {
  // Fourth derivative by a central difference of the third; the operator in
  // d/dphi form must annihilate every row.
  const int prec = 50;
  PrecisionScope s(working_digits(prec));
  const Rational at(1, 60);
  const Rational h(1, 1000000000000000000LL);  // 1e-18, so h^2 ~ 1e-36
  const StateMatrix w = series_wronskian(at, prec);
  const StateMatrix wp = series_wronskian(Rational(at + h), prec);
  const StateMatrix wm = series_wronskian(Rational(at - h), prec);
  const DOperator d = theta_to_d(aesz34());
  const Complex x(at);
  for (int i = 0; i < 4; ++i) {
    std::array<Complex, 5> der;
    for (int m = 0; m < 4; ++m) der[m] = w.w[i][m];
    der[4] = (wp.w[i][3] - wm.w[i][3]) / (2 * to_real(h));
    Complex sum(0);
    for (int j = 0; j <= 4; ++j) {
      Complex pj(0);
      for (std::size_t e = d.p[j].size(); e-- > 0;) pj = pj * x + Complex(to_real(d.p[j][e]));
      sum += pj * der[j];
    }
    EXPECT_TRUE(below(abs(sum), pow10(-25))) << "row " << i;
  }
}

TEST(PfCore, WronskianNonzeroAtOrdinaryPoints) {
  const int prec = 30;
  PrecisionScope s(working_digits(prec));
  for (const Rational& at : {Rational(1, 100), Rational(-1, 50), Rational(1, 30), Rational(-1, 30)})
    EXPECT_GT(abs(det(series_wronskian(at, prec).w)), pow10(-20));
}

TEST(PfCore, SmallPhiLimit) {
  const int prec = 30;
  PrecisionScope s(working_digits(prec));
  const StateMatrix w = series_wronskian(Rational(1, 100000000), prec);
  EXPECT_TRUE(below(abs(w.w[0][0] - Complex(1)), pow10(-6)));
  const BranchedPoint p = BranchedPoint::principal(Rational(1, 100000000));
  const Complex expected = p.log_value / constants(working_digits(prec)).two_pi_i;
  EXPECT_TRUE(below(abs(w.w[1][0] / w.w[0][0] - expected), pow10(-6)));
}
