#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "funkradon/geometry.hpp"
#include "funkradon/inversion.hpp"

using namespace funkradon;

namespace {

std::vector<GeometryFamily> all_families() {
  return {GeometryFamily::radon(1.0),          GeometryFamily::funk(1.0),
          GeometryFamily::hgeodesic(0.8),      GeometryFamily::equidistant(0.8),
          GeometryFamily::ellipse(1.2, 0.8, 0.56), GeometryFamily::ellipse(1.0, 1.0, 0.7),
          GeometryFamily::hyperbola(2.0, 1.0), GeometryFamily::parabola(2.0, 0.2),
          GeometryFamily::cormack(2, 2.0, 0.2), GeometryFamily::cormack(3, 2.0, 0.2)};
}

Point2 sample(const GeometryFamily& g, std::mt19937_64& rng) {
  const Region r = g.region();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lo = std::max(r.inner, 0.05 * r.outer), hi = 0.98 * r.outer;
  const double rad = lo + (hi - lo) * u(rng), th = kTwoPi * u(rng);
  return {rad * std::cos(th), rad * std::sin(th)};
}

}  // namespace

TEST(Psi, KnownValues) {
  EXPECT_DOUBLE_EQ(GeometryFamily::radon().psi({1, 0}, 0.0), -1.0);
  EXPECT_NEAR(GeometryFamily::ellipse(1, 1, 0.7).psi({0, 0}, 1.234), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(GeometryFamily::hyperbola(2.0).psi({1, 0}, 0.0), 1.0);
  EXPECT_NEAR(GeometryFamily::cormack(2).psi({1, 0}, 0.0), -1.0, 1e-15);
}

TEST(Psi, DomainViolations) {
  EXPECT_THROW(GeometryFamily::equidistant(0.8).psi({1.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(GeometryFamily::parabola().psi({0.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(GeometryFamily::hgeodesic(0.8).psi({0.0, 1.5}, 0.0), DomainError);
}

TEST(GradNorm, KnownValues) {
  EXPECT_DOUBLE_EQ(GeometryFamily::radon().grad_norm({0.3, -0.2}, 2.0), 1.0);
  EXPECT_NEAR(GeometryFamily::parabola().grad_norm({0.3, 0.4}, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(GeometryFamily::cormack(2).grad_norm({0.6, 0.8}, 0.5), 2.0, 1e-14);
}

TEST(GradNorm, MatchesFiniteDifferencesOfPsi) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (const auto& g : all_families()) {
    for (int k = 0; k < 100; ++k) {
      const Point2 x = sample(g, rng);
      const double phi = u(rng);
      if (g.family() == Family::parabola && norm(x) + dot(x, unit(phi)) < 1e-3 * norm(x)) continue;
      const double h = 1e-6 * std::max(1.0, norm(x));
      const Point2 fd{(g.psi({x.x + h, x.y}, phi) - g.psi({x.x - h, x.y}, phi)) / (2 * h),
                      (g.psi({x.x, x.y + h}, phi) - g.psi({x.x, x.y - h}, phi)) / (2 * h)};
      const Point2 an = g.gradient(x, phi);
      EXPECT_NEAR(norm(an - fd), 0.0, 1e-6 * std::max(1.0, norm(fd))) << g.descriptor();
      if (g.family() != Family::funk)
        EXPECT_NEAR(g.grad_norm(x, phi), norm(fd), 1e-6 * norm(fd)) << g.descriptor();
    }
  }
}

TEST(GradNorm, FunkSphericalFormAtSymmetricPoints) {
  const auto g = GeometryFamily::funk();
  // at y = 0, x0 = 1 and the metric is Euclidean
  EXPECT_NEAR(g.grad_norm({0, 0}, 0.7), 1.0, 1e-15);
  // |grad_g psi|^2 = x0^-2 (1 + <y,e>^2)
  const Point2 y{0.3, -0.4};
  const double phi = 0.9, x0sq = 1.0 / (1.0 + norm2(y)), u = dot(y, unit(phi));
  EXPECT_NEAR(g.grad_norm(y, phi), std::sqrt((1.0 + u * u) / x0sq), 1e-14);
}

TEST(Dcoef, KnownValues) {
  EXPECT_NEAR(GeometryFamily::hyperbola(std::sqrt(2.0)).dcoef_closed({0.2, 0.5}), 1.0, 1e-14);
  // circular source of radius 1: 1/(4(1 - |x|^2)); see README on the ellipse normalizer
  EXPECT_NEAR(GeometryFamily::ellipse(1, 1, 0.7).dcoef_closed({0.5, 0}), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(GeometryFamily::equidistant(0.8).dcoef_closed({0, 0}), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(GeometryFamily::radon().dcoef_closed({0.4, 0.1}), 1.0);
}

TEST(Dcoef, ClosedFormMatchesQuadrature) {
  std::mt19937_64 rng(2);
  auto fams = all_families();
  fams.push_back(GeometryFamily::ellipse(1.5, 0.6, 0.5));
  for (const auto& g : fams)
    for (int k = 0; k < 20; ++k) {
      const Point2 x = sample(g, rng);
      const double c = g.dcoef_closed(x);
      EXPECT_NEAR(dcoef_quadrature(g, x, 256), c, 1e-8 * c) << g.descriptor();
    }
}

TEST(LambdaRange, KnownValues) {
  const Interval r = GeometryFamily::radon().lambda_range(1.0);
  EXPECT_DOUBLE_EQ(r.lo, -1.0);
  EXPECT_DOUBLE_EQ(r.hi, 1.0);
  const Interval e = GeometryFamily::ellipse(1, 1, 0.9).lambda_range(0.9);
  EXPECT_NEAR(e.lo, 0.01, 1e-15);
  EXPECT_NEAR(e.hi, 3.61, 1e-14);
  const Interval q = GeometryFamily::equidistant(0.3).lambda_range(0.3);
  EXPECT_GT(q.lo, -1.0);
  EXPECT_LT(q.hi, 1.0);
}

TEST(LambdaRange, CoversEveryCurveMeetingTheSupport) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (const auto& g : all_families()) {
    const Interval r = g.lambda_range();
    for (int k = 0; k < 2000; ++k) {
      const Point2 x = sample(g, rng);
      const double l = g.level(x, u(rng));
      EXPECT_GE(l, r.lo - 1e-12) << g.descriptor();
      EXPECT_LE(l, r.hi + 1e-12) << g.descriptor();
    }
  }
}

TEST(Weights, KnownValues) {
  const auto r = GeometryFamily::radon();
  EXPECT_DOUBLE_EQ(r.weight_m({0.2, 0.3}), 1.0);
  EXPECT_DOUBLE_EQ(r.weight_mu(0.4), 1.0);
  const auto e = GeometryFamily::ellipse(1, 1, 0.7);
  EXPECT_DOUBLE_EQ(e.weight_mu(4.0), 4.0);
  EXPECT_DOUBLE_EQ(e.weight_m({0.1, 0.1}), 1.0);
  EXPECT_NEAR(GeometryFamily::cormack(3).weight_m({2.0, 0.0}), 12.0, 1e-13);
  EXPECT_DOUBLE_EQ(GeometryFamily::cormack(3).weight_mu(0.3), 1.0);
  EXPECT_THROW(GeometryFamily::hyperbola(2.0).weight_m({0.3, 0.1}), FactorizationUnavailable);
  EXPECT_THROW(GeometryFamily::hyperbola(2.0).weight_mu(0.3), FactorizationUnavailable);
}

TEST(Weights, FactorizeGradientOnTheCurve) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (const auto& g : all_families()) {
    if (!g.factorizable()) continue;
    for (int k = 0; k < 100; ++k) {
      const Point2 x = sample(g, rng);
      const double phi = u(rng);
      const double lam = g.level(x, phi);
      if (g.family() == Family::ellipse && lam <= 0.0) continue;
      EXPECT_NEAR(g.weight_m(x) * g.weight_mu(lam), g.grad_norm(x, phi), 1e-12 * g.grad_norm(x, phi))
          << g.descriptor();
    }
  }
}

TEST(TrigDifference, KnownValues) {
  const auto t = GeometryFamily::radon().trig_difference({0, 0}, {1, 0});
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(t->a(0), 0.0);
  EXPECT_DOUBLE_EQ(t->a(1), 1.0);
  EXPECT_DOUBLE_EQ(t->b(1), 0.0);
  const auto h = GeometryFamily::hyperbola(2.0).trig_difference({1, 0}, {0, 0});
  ASSERT_TRUE(h);
  EXPECT_DOUBLE_EQ(h->a(0), -1.0);
  EXPECT_DOUBLE_EQ(h->a(1), 2.0);
  EXPECT_DOUBLE_EQ(h->b(1), 0.0);
  const auto g = GeometryFamily::ellipse(1, 1, 0.7);
  const auto e = g.trig_difference({0, 0}, {0.5, 0});
  ASSERT_TRUE(e);
  for (int j = 0; j < 8; ++j) {
    const double p = kTwoPi * j / 8;
    EXPECT_NEAR((*e)(p), g.psi({0, 0}, p) - g.psi({0.5, 0}, p), 1e-14);
  }
  EXPECT_NEAR(e->a(0), -0.25, 1e-15);
  EXPECT_NEAR(e->a(1), 1.0, 1e-15);
  EXPECT_FALSE(GeometryFamily::parabola().trig_difference({0.5, 0}, {0, 0.5}));
  EXPECT_THROW(GeometryFamily::radon().trig_difference({0.1, 0.2}, {0.1, 0.2}), DomainError);
}

TEST(TrigDifference, MatchesPsiDifferenceAt16Angles) {
  std::mt19937_64 rng(8);
  for (const auto& g : all_families()) {
    if (g.family() == Family::parabola) continue;
    for (int k = 0; k < 50; ++k) {
      const Point2 x = sample(g, rng), y = sample(g, rng);
      const auto t = g.trig_difference(x, y);
      ASSERT_TRUE(t);
      for (int j = 0; j < 16; ++j) {
        const double p = kTwoPi * j / 16;
        EXPECT_NEAR((*t)(p), g.psi(x, p) - g.psi(y, p), 1e-12) << g.descriptor();
      }
    }
  }
}

TEST(TrigDifference, EllipseSupportConditionGivesRealSimpleZeros) {
  const auto g = GeometryFamily::ellipse(1.2, 0.8, 0.56);
  ASSERT_TRUE(g.support_condition_holds());
  std::mt19937_64 rng(10);
  for (int k = 0; k < 200; ++k) {
    const Point2 x = sample(g, rng), y = sample(g, rng);
    ASSERT_LT(g.dual_norm(x + y), 2.0);
    EXPECT_TRUE(all_real_simple(*g.trig_difference(x, y)));
  }
  EXPECT_FALSE(GeometryFamily::ellipse(1.2, 0.8, 1.5).support_condition_holds());
}

TEST(Descriptor, ParseAndRoundTrip) {
  const auto g = GeometryFamily::parse("ellipse:e1=1.2,e2=0.8,support=0.7");
  EXPECT_EQ(g.family(), Family::ellipse);
  EXPECT_DOUBLE_EQ(g.params().e1, 1.2);
  EXPECT_DOUBLE_EQ(g.support_radius(), 0.7);
  const auto h = GeometryFamily::parse("hyperbola:support=1.5,eps=2.0");
  EXPECT_DOUBLE_EQ(h.params().eps, 2.0);
  EXPECT_DOUBLE_EQ(h.support_radius(), 1.5);
  const auto c = GeometryFamily::parse("cormack:k=2,support=1.0");
  EXPECT_EQ(c.params().k, 2);
  for (const auto& f : all_families()) {
    const auto r = GeometryFamily::parse(f.descriptor());
    EXPECT_EQ(r.descriptor(), f.descriptor());
  }
  EXPECT_EQ(GeometryFamily::parse("radon").support_radius(), 1.0);
}

TEST(Descriptor, Errors) {
  try {
    GeometryFamily::parse("elipse:e1=1,e2=1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("elipse"), std::string::npos);
  }
  EXPECT_THROW(GeometryFamily::parse("Radon"), ParseError);
  EXPECT_THROW(GeometryFamily::parse("radon:support=x"), ParseError);
  EXPECT_THROW(GeometryFamily::parse("radon:foo=1"), ParseError);
  EXPECT_THROW(GeometryFamily::parse("radon:support=1,support=2"), ParseError);
  EXPECT_THROW(GeometryFamily::parse("cormack:support=1"), UsageError);
  EXPECT_THROW(GeometryFamily::parse("cormack:k=1.5"), UsageError);
  EXPECT_THROW(GeometryFamily::parse("hyperbola:eps=0.9"), DomainError);
  EXPECT_THROW(GeometryFamily::parse("equidistant:support=1"), DomainError);
  EXPECT_THROW(GeometryFamily::parse("ellipse:e1=-1,e2=1"), DomainError);
}
