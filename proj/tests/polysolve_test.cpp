#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rpr/resultant.hpp"
#include "rpr/roots.hpp"
#include "rpr/trigpoly.hpp"

using namespace rpr;

namespace {

QPoly qpoly(std::initializer_list<long> c) {
  std::vector<Rational> v;
  for (long x : c) v.emplace_back(x);
  return QPoly(std::move(v));
}

// t - c where c may depend on t1 through `in_t1`
QBiPoly linear_in_t(const QPoly& constant_in_t1) {
  return QBiPoly({-constant_in_t1, QPoly::constant(Rational(1))});
}

QBiPoly random_bipoly(std::mt19937& rng, int dt, int dt1) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::vector<QPoly> rows;
  for (int i = 0; i <= dt; ++i) {
    std::vector<Rational> c;
    for (int j = 0; j <= dt1; ++j) c.emplace_back(coef(rng));
    rows.emplace_back(std::move(c));
  }
  // unit coefficient keeps the integer form primitive
  rows.back() = rows.back() + QPoly::monomial(Rational(1), dt1 + 1);
  return QBiPoly(std::move(rows));
}

// Sturm sequence count of distinct real roots; independent of the
// Descartes-based isolation under test.
int sturm_distinct_real_roots(const QPoly& p) {
  std::vector<QPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero()) {
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
    seq.push_back(-r);
  }
  seq.pop_back();
  auto variations = [&](bool at_plus_infinity) {
    int count = 0, last = 0;
    for (const auto& q : seq) {
      int s = sgn(q.leading());
      if (!at_plus_infinity && q.degree() % 2 == 1) s = -s;
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  };
  return variations(false) - variations(true);
}

}  // namespace

TEST(TrigToBipoly, CosineBecomesOneMinusTSquared) {
  QBiPoly p = trig_to_bipoly(TrigPoly::cos_alpha());
  EXPECT_EQ(p.deg_t(), 2);
  EXPECT_EQ(p.deg_t1(), 0);
  EXPECT_EQ(p.coeff(0, 0), 1);
  EXPECT_EQ(p.coeff(1, 0), 0);
  EXPECT_EQ(p.coeff(2, 0), -1);
}

TEST(TrigToBipoly, PythagoreanIdentityIsZero) {
  TrigPoly s = TrigPoly::sin_alpha(), c = TrigPoly::cos_alpha();
  TrigPoly p = s * s + c * c - TrigPoly(Rational(1));
  EXPECT_TRUE(p.is_zero());
  EXPECT_TRUE(trig_to_bipoly(p).is_zero());
}

TEST(TrigToBipoly, BackSubstitutionMatchesClearedTrigValue) {
  TrigPoly ca = TrigPoly::cos_alpha(), sa = TrigPoly::sin_alpha();
  TrigPoly c1 = TrigPoly::cos_theta1(), s1 = TrigPoly::sin_theta1();
  TrigPoly p = ca * c1 * Rational(3) - sa * sa * s1 + c1 * c1 * ca * Rational(7, 2) - TrigPoly(Rational(2)) + sa * s1;
  const int da = p.degree_alpha(), d1 = p.degree_theta1();
  QBiPoly b = trig_to_bipoly(p);
  EXPECT_LE(b.deg_t(), 2 * da);
  EXPECT_LE(b.deg_t1(), 2 * d1);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(-3.0, 3.0);
  for (int k = 0; k < 100; ++k) {
    double a = ang(rng), th = ang(rng);
    double t = std::tan(a / 2), t1 = std::tan(th / 2);
    double expected = p.eval(a, th) * std::pow(1 + t * t, da) * std::pow(1 + t1 * t1, d1);
    double got = b.eval<double>(t, t1);
    EXPECT_NEAR(got, expected, 1e-10 * std::max(1.0, b.eval_abs<double>(t, t1)));
  }
}

TEST(TrigPoly, DerivativesMatchFiniteDifferences) {
  TrigPoly ca = TrigPoly::cos_alpha(), sa = TrigPoly::sin_alpha();
  TrigPoly c1 = TrigPoly::cos_theta1(), s1 = TrigPoly::sin_theta1();
  TrigPoly p = ca * ca * s1 * Rational(2) + sa * c1 - ca * sa * c1 * s1;
  const double h = 1e-6;
  for (double a : {-2.0, 0.3, 1.7})
    for (double th : {-1.1, 0.4, 2.9}) {
      double fa = (p.eval(a + h, th) - p.eval(a - h, th)) / (2 * h);
      double ft = (p.eval(a, th + h) - p.eval(a, th - h)) / (2 * h);
      EXPECT_NEAR(p.diff_alpha().eval(a, th), fa, 1e-8);
      EXPECT_NEAR(p.diff_theta1().eval(a, th), ft, 1e-8);
    }
}

TEST(Resultant, DistinctConstantsGiveUnit) {
  QBiPoly a = linear_in_t(QPoly::constant(Rational(2)));
  QBiPoly b = linear_in_t(QPoly::constant(Rational(3)));
  ZPoly r = sylvester_resultant(a, b);
  ASSERT_EQ(r.degree(), 0);
  EXPECT_EQ(abs(r.coeff(0)), 1);
}

TEST(Resultant, CommonRootCondition) {
  QBiPoly a = linear_in_t(qpoly({0, 1}));  // t - t1
  QBiPoly b = linear_in_t(QPoly::constant(Rational(5)));
  auto roots = real_roots(to_rational(sylvester_resultant(a, b)));
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_EQ(roots[0].lower, 5);
  EXPECT_EQ(roots[0].upper, 5);
}

TEST(Resultant, SharedFactorIsReportedNotEmpty) {
  QBiPoly a = linear_in_t(QPoly::constant(Rational(1))) * linear_in_t(qpoly({0, 1}));
  QBiPoly b = linear_in_t(QPoly::constant(Rational(1))) * linear_in_t(QPoly::constant(Rational(-2)));
  EXPECT_THROW(sylvester_resultant(a, b), CommonFactor);
}

TEST(Resultant, MethodsAgreeAndAreMultiplicative) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    QBiPoly a = random_bipoly(rng, 2, 2), b = random_bipoly(rng, 3, 1), c = random_bipoly(rng, 1, 2);
    ResultantOptions ff{DeterminantMethod::kFractionFree, 1};
    ZPoly rab = sylvester_resultant(a, b);
    EXPECT_EQ(rab, sylvester_resultant(a, b, ff));
    ZPoly rcb = sylvester_resultant(c, b);
    ZPoly racb = sylvester_resultant(a * c, b);
    ZPoly prod = rab * rcb;
    EXPECT_TRUE(racb == prod || racb == -prod);
  }
}

TEST(Resultant, VanishesExactlyWhereSpecializationsShareARoot) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    // (t - 2) + (t1 - 3/2) h shares the root t = 2 at t1 = 3/2
    QBiPoly g = random_bipoly(rng, 1, 1);
    QBiPoly lin({qpoly({-2}), qpoly({1})});
    QBiPoly drift({QPoly({Rational(-3, 2), Rational(1)})});
    QBiPoly a = lin + drift * g;
    QBiPoly b = lin * random_bipoly(rng, 1, 1) + drift * drift;
    ZPoly r = sylvester_resultant(a, b);
    std::vector<Rational> samples{Rational(3, 2)};
    std::uniform_int_distribution<int> num(-40, 40), den(1, 9);
    for (int k = 0; k < 49; ++k) samples.emplace_back(num(rng), den(rng));
    for (auto& x : samples) {
      x.canonicalize();
      bool res_zero = r.eval(Rational(x)) == 0;
      QPoly ga = a.at_t1(x), gb = b.at_t1(x);
      bool common = !ga.is_zero() && !gb.is_zero() && gcd(ga, gb).degree() > 0;
      EXPECT_EQ(res_zero, common) << "t1 = " << x;
    }
  }
}

TEST(RealRoots, QuadraticIrrational) {
  auto roots = real_roots(qpoly({-2, 0, 1}));
  ASSERT_EQ(roots.size(), 2u);
  EXPECT_NEAR(roots[0].value, -std::sqrt(2.0), 1e-13);
  EXPECT_NEAR(roots[1].value, std::sqrt(2.0), 1e-13);
  EXPECT_EQ(roots[0].multiplicity, 1);
  EXPECT_LE(Rational(roots[1].upper - roots[1].lower).get_d(), 1e-13 * std::sqrt(2.0));
}

TEST(RealRoots, TripleRoot) {
  QPoly p = qpoly({-1, 1}).pow(3);
  auto roots = real_roots(p);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_DOUBLE_EQ(roots[0].value, 1.0);
  EXPECT_EQ(roots[0].multiplicity, 3);
}

TEST(RealRoots, ZeroPolynomialIsAnError) { EXPECT_THROW(real_roots(QPoly()), PolynomialError); }

TEST(RealRoots, ConstructedRationalRootsAreRecoveredExactly) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> num(-30, 30), den(1, 12), mult(1, 3), count(1, 6);
  for (int trial = 0; trial < 40; ++trial) {
    std::map<Rational, int> truth;
    QPoly p = QPoly::constant(Rational(1));
    int n = count(rng);
    for (int k = 0; k < n; ++k) {
      Rational r(num(rng), den(rng));
      r.canonicalize();
      int m = mult(rng);
      truth[r] += m;
      p = p * QPoly({Rational(-r), Rational(1)}).pow(m);
    }
    // irreducible quadratic factor with no real roots must not contribute
    p = p * qpoly({3, 1, 1});
    auto roots = real_roots(p);
    ASSERT_EQ(roots.size(), truth.size());
    std::size_t i = 0;
    for (const auto& [r, m] : truth) {
      EXPECT_LE(roots[i].lower, r);
      EXPECT_GE(roots[i].upper, r);
      EXPECT_EQ(roots[i].multiplicity, m);
      ++i;
    }
    EXPECT_EQ(static_cast<int>(roots.size()), sturm_distinct_real_roots(p));
  }
}

TEST(RealRoots, MatchesSturmCountOnRandomPolynomials) {
  std::mt19937 rng(19);
  std::uniform_int_distribution<int> coef(-50, 50), deg(1, 14);
  for (int trial = 0; trial < 60; ++trial) {
    int d = deg(rng);
    std::vector<Rational> c;
    for (int i = 0; i <= d; ++i) c.emplace_back(coef(rng));
    c.back() = c.back() == 0 ? Rational(1) : c.back();
    QPoly p(std::move(c));
    EXPECT_EQ(static_cast<int>(real_roots(p).size()), sturm_distinct_real_roots(p));
    EXPECT_EQ(count_real_roots(p), sturm_distinct_real_roots(p));
  }
}

TEST(RealRoots, DomainRestriction) {
  QPoly p = qpoly({-1, 1}) * qpoly({2, 1}) * qpoly({-5, 1});
  auto roots = real_roots(p, Interval{0.0, 2.0});
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_DOUBLE_EQ(roots[0].value, 1.0);
}

TEST(EvalBipoly, Basics) {
  EXPECT_EQ(eval_bipoly(QBiPoly(), 3.0, -2.0), 0.0);
  QBiPoly p({QPoly(), qpoly({0, 1})});  // t * t1
  EXPECT_DOUBLE_EQ(eval_bipoly(p, 2.0, 3.0), 6.0);
}

TEST(BiPoly, StripCircleFactors) {
  QBiPoly circle_t({qpoly({1}), QPoly(), qpoly({1})});
  QBiPoly circle_t1({qpoly({1, 0, 1})});
  QBiPoly core({qpoly({1, 2}), qpoly({0, -1})});
  QBiPoly p = core * circle_t * circle_t * circle_t1;
  auto [nt, nt1] = p.strip_circle_factors();
  EXPECT_EQ(nt, 2);
  EXPECT_EQ(nt1, 1);
  EXPECT_EQ(p, core);
}
