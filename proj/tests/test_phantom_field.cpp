#include <gtest/gtest.h>

#include <cmath>

#include "funkradon/phantom.hpp"

using namespace funkradon;

TEST(PhantomEval, KnownValues) {
  const auto g = Phantom::gaussian({0, 0}, 0.2);
  EXPECT_DOUBLE_EQ(g({0, 0}), 1.0);
  EXPECT_NEAR(g({0.2, 0}), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(g({0, -0.2}), 0.6065306597126334, 1e-15);
  EXPECT_DOUBLE_EQ(Phantom()({0.3, 0.1}), 0.0);
}

TEST(PhantomEval, DiscsAndSums) {
  const auto d = Phantom::disc({0.5, 0}, 0.3, 2.0);
  EXPECT_DOUBLE_EQ(d({0.5, 0.29}), 2.0);
  EXPECT_DOUBLE_EQ(d({0.5, 0.31}), 0.0);
  const auto m = Phantom::disc({0, 0}, 0.5, 1.0, 0.1);
  EXPECT_DOUBLE_EQ(m({0.35, 0}), 1.0);
  EXPECT_DOUBLE_EQ(m({0.55, 0}), 0.0);
  EXPECT_NEAR(m({0.45, 0}), 0.5, 1e-12);
  const double a = m({0.42, 0}), b = m({0.48, 0});
  EXPECT_NEAR(a + b, 1.0, 1e-12);
  const auto s = Phantom::gaussian({0, 0}, 0.2) + d.scaled(0.5);
  EXPECT_NEAR(s({0.5, 0}), std::exp(-0.5 * 0.25 / 0.04) + 1.0, 1e-15);
  EXPECT_EQ(s.components().size(), 2u);
}

TEST(PhantomEval, VanishesOutsideSupport) {
  const auto p = Phantom::gaussian({0.1, 0.2}, 0.1) + Phantom::disc({-0.3, 0}, 0.2, 1.0, 0.05);
  const double R = p.support_radius();
  for (int k = 0; k < 64; ++k) {
    const double th = kTwoPi * k / 64;
    EXPECT_LE(std::abs(p(Point2{std::cos(th), std::sin(th)} * R)), 1e-7);
  }
  const auto [c, r] = p.bounding_disc();
  for (const auto& comp : p.components()) EXPECT_LE(norm(comp.center - c) + comp.reach(), r + 1e-12);
}

TEST(PhantomDescriptor, ParseAndRoundTrip) {
  const auto p = Phantom::parse("gauss:0,0,0.2,1;disc:0.5,-0.25,0.3,2,0.05");
  ASSERT_EQ(p.components().size(), 2u);
  EXPECT_EQ(p.components()[1].shape, Component::Shape::disc);
  EXPECT_DOUBLE_EQ(p.components()[1].width, 0.05);
  EXPECT_EQ(Phantom::parse(p.descriptor()).descriptor(), p.descriptor());
  EXPECT_DOUBLE_EQ(p.feature_scale(), 0.05);
  EXPECT_DOUBLE_EQ(p.max_amplitude(), 2.0);
}

TEST(PhantomDescriptor, Errors) {
  EXPECT_THROW(Phantom::parse(""), ParseError);
  EXPECT_THROW(Phantom::parse("gauss:0,0,0.2"), ParseError);
  EXPECT_THROW(Phantom::parse("blob:0,0,1,1"), ParseError);
  EXPECT_THROW(Phantom::parse("gauss:0,0,x,1"), ParseError);
  EXPECT_THROW(Phantom::parse("gauss:0,0,-0.2,1"), DomainError);
  EXPECT_THROW(Phantom::parse("disc:0,0,0.2,1,-1"), DomainError);
  try {
    Phantom::parse("gauss:0,0,0.1,1;gauss:0,zz,0.1,1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 24u);
  }
}

TEST(Rasterize, ThreeByThree) {
  const Grid g = Grid::centered(3, 0.2);
  const auto f = rasterize(Phantom::gaussian({0, 0}, 0.2), g);
  EXPECT_DOUBLE_EQ(f(1, 1), 1.0);
  EXPECT_NEAR(f(2, 1), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(f(0, 0), std::exp(-1.0), 1e-15);
  const auto z = rasterize(Phantom(), g);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
  const auto q = rasterize(Phantom::gaussian({0.1, -0.2}, 0.3, 2.0), g);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(q(i, j), Phantom::gaussian({0.1, -0.2}, 0.3, 2.0)(g.point(i, j)));
}

TEST(Metrics, KnownValues) {
  const Grid g = Grid::centered(9, 1.0);
  const auto b = rasterize(Phantom::gaussian({0, 0}, 0.4), g);
  EXPECT_EQ(rel_l2(b, b), 0.0);
  EXPECT_EQ(linf(b, b), 0.0);
  ScalarField a2 = b;
  for (double& v : a2.values()) v *= 2.0;
  EXPECT_NEAR(rel_l2(a2, b), 1.0, 1e-15);
  ScalarField a3 = b;
  for (double& v : a3.values()) v += 0.1;
  EXPECT_NEAR(linf(a3, b), 0.1, 1e-15);
  EXPECT_THROW(rel_l2(b, rasterize(Phantom(), Grid::centered(5, 1.0))), DomainError);
}

TEST(Metrics, IntegralOfGaussian) {
  const Grid g = Grid::centered(201, 1.0);
  const auto f = rasterize(Phantom::gaussian({0, 0}, 0.1), g);
  EXPECT_NEAR(f.integral(), kTwoPi * 0.01, 1e-10);
}
