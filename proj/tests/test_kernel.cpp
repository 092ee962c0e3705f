#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "funkradon/kernel.hpp"

using namespace funkradon;

TEST(Nucleus, KnownValues) {
  EXPECT_TRUE(nucleus_check(GeometryFamily::radon(), {0, 0}, {1, 0}).pass);
  EXPECT_TRUE(nucleus_check(GeometryFamily::cormack(2, 2.0, 0.2), {1, 0}, {0, 1}).pass);
  const auto r = nucleus_check(GeometryFamily::ellipse(1, 1, 0.7), {0.3, 0}, {0, 0.2});
  EXPECT_TRUE(r.pass);
  EXPECT_LE(std::abs(r.value), r.tolerance);
  EXPECT_FALSE(r.sampled);
  EXPECT_EQ(r.eps.size(), r.regularized.size());
}

TEST(Nucleus, RegularizedValuesApproachTheLimit) {
  const auto r = nucleus_check(GeometryFamily::hyperbola(2.0), {0.3, 0.1}, {-0.2, 0.5});
  ASSERT_GE(r.regularized.size(), 3u);
  // Re 1/(t + i eps)^2 integrates to O(eps) for real simple zeros
  for (std::size_t i = 1; i < r.regularized.size(); ++i)
    EXPECT_LT(std::abs(r.regularized[i]), std::abs(r.regularized[i - 1]));
  EXPECT_TRUE(r.pass);
}

TEST(Nucleus, ParabolaSampledPathVanishesWhileOneLiftDoesNot) {
  const auto g = GeometryFamily::parabola(2.0, 0.2);
  const auto r = nucleus_check(g, {0.5, 0.3}, {-0.2, 0.6});
  EXPECT_TRUE(r.sampled);
  EXPECT_TRUE(r.pass) << r.value;
  ASSERT_TRUE(r.literal.has_value());
  EXPECT_GT(std::abs(*r.literal), 1.0);
}

TEST(Nucleus, RandomPairsAllFamilies) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<GeometryFamily> fams{GeometryFamily::radon(),        GeometryFamily::funk(),
                                         GeometryFamily::hgeodesic(0.8), GeometryFamily::equidistant(0.8),
                                         GeometryFamily::ellipse(1.2, 0.8, 0.56), GeometryFamily::hyperbola(2.0),
                                         GeometryFamily::cormack(2, 2.0, 0.2),    GeometryFamily::cormack(3, 2.0, 0.2),
                                         GeometryFamily::parabola(2.0, 0.2)};
  for (const auto& g : fams) {
    for (int k = 0; k < 10; ++k) {
      auto pt = [&] {
        const Region reg = g.region();
        const double lo = std::max(reg.inner * 1.02, 0.02), hi = 0.98 * reg.outer;
        const double rad = lo + (hi - lo) * u(rng), th = kTwoPi * u(rng);
        return Point2{rad * std::cos(th), rad * std::sin(th)};
      };
      const Point2 x = pt(), y = pt();
      const auto r = nucleus_check(g, x, y);
      EXPECT_TRUE(r.pass) << g.descriptor() << " N=" << r.value << " tol=" << r.tolerance;
    }
  }
}

TEST(Nucleus, EllipseOutsideSupportConditionCanFail) {
  // y + x far outside the dual-norm bound: t has no real zeros and N > 0
  const auto g = GeometryFamily::ellipse(1.2, 0.8, 1.5);
  const auto r = nucleus_check(g, {1.4, 0.0}, {1.3, 0.0});
  EXPECT_FALSE(all_real_simple(*g.trig_difference({1.4, 0.0}, {1.3, 0.0})));
  EXPECT_FALSE(r.pass);
}

TEST(Nucleus, Rejections) {
  EXPECT_THROW(nucleus_check(GeometryFamily::radon(), {0.1, 0.1}, {0.1, 0.1}), DomainError);
  EXPECT_THROW(nucleus_check(GeometryFamily::parabola(), {0, 0}, {0.5, 0.1}), DomainError);
}
