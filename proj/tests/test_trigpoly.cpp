#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "funkradon/quadrature.hpp"
#include "funkradon/trigpoly.hpp"

using namespace funkradon;

namespace {

const TrigPoly kCos = TrigPoly::first_order(0.0, 1.0, 0.0);
const TrigPoly kShifted = TrigPoly::first_order(1.0, 0.5, 0.0);  // 1 + 0.5 cos
const TrigPoly kTwoCosMinusOne = TrigPoly::first_order(-1.0, 2.0, 0.0);

TrigPoly random_poly(std::mt19937_64& rng, int order) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> a(order + 1), b(order);
  for (double& v : a) v = u(rng);
  for (double& v : b) v = u(rng);
  a[order] += a[order] >= 0 ? 0.2 : -0.2;
  return TrigPoly(a, b);
}

// 2 sin((phi - p)/2) sin((phi - q)/2), zeros at p and q
TrigPoly factor(double p, double q) {
  return TrigPoly::first_order(std::cos(0.5 * (p - q)), -std::cos(0.5 * (p + q)), -std::sin(0.5 * (p + q)));
}

TrigPoly product(const TrigPoly& f1, const TrigPoly& f2) {
  return TrigPoly({f1.a(0) * f2.a(0) + 0.5 * (f1.a(1) * f2.a(1) + f1.b(1) * f2.b(1)),
                   f1.a(0) * f2.a(1) + f1.a(1) * f2.a(0), 0.5 * (f1.a(1) * f2.a(1) - f1.b(1) * f2.b(1))},
                  {f1.a(0) * f2.b(1) + f1.b(1) * f2.a(0), 0.5 * (f1.a(1) * f2.b(1) + f1.b(1) * f2.a(1))});
}

// Brute-force eps-regularized oracle, independent of the library's ladder.
double eps_oracle(const TrigPoly& t) {
  std::vector<double> eps{4e-3, 2e-3, 1e-3, 5e-4}, vals;
  for (double e : eps) {
    auto f = [&](double p) {
      const double v = t(p);
      return (v * v - e * e) / ((v * v + e * e) * (v * v + e * e));
    };
    std::vector<double> br;
    for (int i = 0; i <= 20000; ++i) br.push_back(kTwoPi * i / 20000);
    vals.push_back(quad::integrate_pieces(f, br, 1e-12, 1e-12).value);
  }
  return quad::extrapolate_to_zero(eps, vals);
}

}  // namespace

TEST(TrigPolyEval, KnownValues) {
  EXPECT_DOUBLE_EQ(kCos(0.0), 1.0);
  const Complex ci = kCos(Complex{0.0, 1.0});
  EXPECT_NEAR(ci.real(), std::cosh(1.0), 1e-14);
  EXPECT_NEAR(ci.imag(), 0.0, 1e-14);
  EXPECT_NEAR(kShifted(kPi), 0.5, 1e-15);
}

TEST(TrigPolyEval, PeriodicAndTrimmed) {
  const TrigPoly t({0.3, 0.0, 1.0, 0.0}, {0.5, 0.0, 0.0});
  EXPECT_EQ(t.order(), 2);
  EXPECT_NEAR(t(0.7), t(0.7 + kTwoPi), 1e-13);
  EXPECT_EQ(TrigPoly::constant(2.0).order(), 0);
}

TEST(TrigPolyEval, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(3);
  const TrigPoly t = random_poly(rng, 3);
  const TrigPoly d = t.derivative();
  for (double p : {0.1, 1.3, 4.0}) {
    const double h = 1e-5;
    EXPECT_NEAR(d(p), (t(p + h) - t(p - h)) / (2 * h), 1e-8);
  }
}

TEST(TrigPolyRoots, Cosine) {
  auto r = real_roots(kCos);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], kPi / 2, 1e-12);
  EXPECT_NEAR(r[1], 3 * kPi / 2, 1e-12);
}

TEST(TrigPolyRoots, ComplexPair) {
  auto r = roots(kShifted);
  ASSERT_EQ(r.size(), 2u);
  for (const auto& z : r) {
    EXPECT_NEAR(z.real(), kPi, 1e-10);
    EXPECT_NEAR(std::abs(z.imag()), std::acosh(2.0), 1e-10);
    EXPECT_LT(std::abs(kShifted(z)), 1e-10);
  }
  EXPECT_NEAR(r[0].imag() + r[1].imag(), 0.0, 1e-10);
}

TEST(TrigPolyRoots, TwoCosMinusOne) {
  auto r = real_roots(kTwoCosMinusOne);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_NEAR(r[0], kPi / 3, 1e-12);
  EXPECT_NEAR(r[1], 5 * kPi / 3, 1e-12);
}

TEST(TrigPolyRoots, RandomPolynomialsResidualCountAndConjugation) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 1 + trial % 5;
    const TrigPoly t = random_poly(rng, k);
    const auto r = roots(t);
    ASSERT_EQ(static_cast<int>(r.size()), 2 * k);
    for (const auto& z : r) {
      EXPECT_LE(std::abs(t(z)), 1e-9 * t.norm() * std::max(1.0, std::exp(k * std::abs(z.imag()))));
      if (std::abs(z.imag()) > 1e-8) {
        bool found = false;
        for (const auto& w : r) found = found || std::abs(w - std::conj(z)) < 1e-7;
        EXPECT_TRUE(found);
      }
    }
  }
}

TEST(TrigPolyRoots, ConstantHasNone) { EXPECT_TRUE(roots(TrigPoly::constant(1.0)).empty()); }

TEST(TrigPolyRealSimple, KnownValues) {
  EXPECT_TRUE(all_real_simple(kCos));
  EXPECT_FALSE(all_real_simple(kShifted));
  EXPECT_TRUE(all_real_simple(kTwoCosMinusOne));
  EXPECT_FALSE(all_real_simple(TrigPoly::first_order(1.0, 1.0, 0.0)));  // double zero at pi
}

TEST(PvInverseSquare, VanishesForRealSimpleZeros) {
  for (const TrigPoly& t : {kCos, kTwoCosMinusOne}) {
    const auto eps = default_eps_ladder(pv_scale(t));
    EXPECT_NEAR(pv_inverse_square(t, eps), 0.0, 1e-6);
  }
}

TEST(PvInverseSquare, ZeroFreeMatchesPoissonDerivative) {
  const auto eps = default_eps_ladder(pv_scale(kShifted));
  const double expect = kTwoPi / std::pow(0.75, 1.5);
  EXPECT_NEAR(pv_inverse_square(kShifted, eps), expect, 1e-8);
  EXPECT_NEAR(eps_oracle(kShifted), expect, 1e-6);
}

TEST(PvInverseSquare, AgreesWithEpsOracleOnSecondOrderPolynomial) {
  const TrigPoly t = product(factor(0.5, 2.0), factor(3.5, 5.0));
  ASSERT_TRUE(all_real_simple(t));
  ASSERT_EQ(real_roots(t).size(), 4u);
  const double lib = pv_inverse_square(t, default_eps_ladder(pv_scale(t)));
  EXPECT_NEAR(lib, 0.0, 1e-5 * std::pow(pv_scale(t), 2));
  EXPECT_NEAR(eps_oracle(t), 0.0, 1e-3);
}

TEST(PvInverseSquare, VanishesOnRandomRealRootedProducts) {
  // eps must stay well below the smallest slope times the gap to the next
  // zero, so the ladder here starts from the smallest slope
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  int tested = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const double a1 = u(rng), a2 = u(rng), b1 = u(rng), b2 = u(rng);
    const TrigPoly f1 = factor(a1, a2), f2 = factor(b1, b2);
    const TrigPoly t = product(f1, f2);
    for (double p : {0.3, 2.0, 5.1}) ASSERT_NEAR(t(p), f1(p) * f2(p), 1e-12);
    const auto z = real_roots(t);
    ASSERT_EQ(z.size(), 4u);
    double gap = kTwoPi - (z.back() - z.front());
    for (std::size_t i = 1; i < z.size(); ++i) gap = std::min(gap, z[i] - z[i - 1]);
    if (gap < 0.3) continue;
    ++tested;
    double smin = pv_scale(t);
    for (double r : z) smin = std::min(smin, std::abs(t.derivative()(r)));
    const double s = pv_scale(t);
    EXPECT_LE(std::abs(pv_inverse_square(t, default_eps_ladder(smin * gap))), 1e-4 * std::max(1.0, s * s)) << trial;
  }
  EXPECT_GE(tested, 10);
}

TEST(PvInverseSquare, CloseZerosNeedAFinerLadder) {
  const TrigPoly t = product(factor(0.242, 4.229), factor(1.416, 4.247));
  const double s = pv_scale(t);
  EXPECT_GT(std::abs(pv_inverse_square(t, default_eps_ladder(s))), 1.0);
  const double fine = pv_inverse_square(t, default_eps_ladder(1e-3 * s));
  EXPECT_LE(std::abs(fine), 1e-3 * s * s);
}

TEST(PvInverseSquare, RejectsBadLadderAndRepeatedZero) {
  std::vector<double> up{1e-3, 2e-3};
  EXPECT_THROW(pv_inverse_square(kCos, up), DomainError);
  std::vector<double> ok{1e-2, 5e-3, 2.5e-3};
  EXPECT_THROW(pv_inverse_square(TrigPoly::first_order(1.0, 1.0, 0.0), ok), DomainError);
}

TEST(ResidueIntegral, KnownValues) {
  EXPECT_NEAR(residue_integral(TrigPoly::constant(1.0), kShifted), kTwoPi / std::sqrt(0.75), 1e-12);
  EXPECT_NEAR(residue_integral(TrigPoly::constant(1.0), TrigPoly({1.5, 0.0, 0.5}, {0.0, 0.0})),
              kTwoPi / std::sqrt(2.0), 1e-12);
  const TrigPoly s = kCos, t = TrigPoly::first_order(2.0, 1.0, 0.0);
  const double oracle = quad::integrate([&](double p) { return s(p) / t(p); }, 0.0, kTwoPi).value;
  EXPECT_NEAR(residue_integral(s, t), oracle, 1e-12);
  EXPECT_NEAR(residue_integral(s, t), kTwoPi * (1.0 - 2.0 / std::sqrt(3.0)), 1e-12);
}

TEST(ResidueIntegral, RandomAgainstQuadrature) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 1 + trial % 3;
    TrigPoly t = random_poly(rng, k);
    double mass = 0.0;
    for (int m = 1; m <= k; ++m) mass += std::abs(t.a(m)) + std::abs(t.b(m));
    std::vector<double> a(k + 1), b(k);
    for (int m = 0; m <= k; ++m) a[m] = t.a(m);
    for (int m = 1; m <= k; ++m) b[m - 1] = t.b(m);
    a[0] = 1.5 * mass;
    t = TrigPoly(a, b);
    const TrigPoly s = random_poly(rng, trial % (k + 1));
    const double direct = quad::integrate([&](double p) { return s(p) / t(p); }, 0.0, kTwoPi, 1e-15, 1e-14).value;
    EXPECT_NEAR(residue_integral(s, t), direct, 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

TEST(ResidueIntegral, Rejections) {
  EXPECT_THROW(residue_integral(TrigPoly::constant(1.0), kCos), DomainError);
  EXPECT_THROW(residue_integral(TrigPoly({0.0, 0.0, 1.0}, {0.0, 0.0}), kShifted), DomainError);
  EXPECT_THROW(residue_integral(TrigPoly::constant(1.0), TrigPoly::constant(2.0)), DomainError);
}

TEST(Quadrature, ExtrapolationAndPeriodicMean) {
  std::vector<double> h{0.1, 0.05, 0.025}, v;
  for (double x : h) v.push_back(2.0 + 3.0 * x - x * x);
  EXPECT_NEAR(quad::extrapolate_to_zero(h, v), 2.0, 1e-12);
  EXPECT_NEAR(quad::periodic_mean([](double p) { return 1.0 / (2.0 + std::cos(p)); }, 64), 1.0 / std::sqrt(3.0),
              1e-14);
  EXPECT_NEAR(quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value, std::exp(1.0) - 1.0, 1e-13);
}
