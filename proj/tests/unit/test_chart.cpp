#include <gtest/gtest.h>

#include <cmath>

#include "property.hpp"
#include "radon_edges/chart.hpp"
#include "radon_edges/errors.hpp"
#include "radon_edges/phantom.hpp"
#include "radon_edges/radon.hpp"

using namespace radon_edges;
using radon_edges::test_support::for_all;
using radon_edges::test_support::Gen;

TEST(ToInhomogeneous, DirectSubstitution) {
  const auto c = to_inhomogeneous(Homogeneous{0.0, -1.0, 1.0});
  EXPECT_EQ(c.beta, 0.0);
  EXPECT_EQ(c.q, 1.0);
}

TEST(ToInhomogeneous, ProjectiveScaling) {
  const auto a = to_inhomogeneous(Homogeneous{0.0, 1.0, 0.0});
  const auto b = to_inhomogeneous(Homogeneous{0.0, 2.0, 0.0});
  EXPECT_EQ(a.beta, b.beta);
  EXPECT_EQ(a.q, b.q);
  EXPECT_EQ(a.q, 0.0);
}

TEST(ToInhomogeneous, VerticalLineIsExcluded) {
  EXPECT_THROW(to_inhomogeneous(Homogeneous{1.0, 0.0, 0.0}), ChartExcluded);
  EXPECT_THROW(to_inhomogeneous(AngleOffset{0.0, 0.3}), ChartExcluded);
}

TEST(ToInhomogeneous, SwappedChartCoversVerticalLines) {
  // x1 = 2 written as x1 = beta*x2 - q.
  const auto c = to_inhomogeneous(Homogeneous{1.0, 0.0, 2.0}, Chart::B);
  EXPECT_EQ(c.beta, 0.0);
  EXPECT_EQ(c.q, -2.0);
  EXPECT_THROW(to_inhomogeneous(Homogeneous{0.0, 1.0, 0.0}, Chart::B), ChartExcluded);
}

TEST(ToInhomogeneous, DiagonalWorkedExample) {
  // theta = pi/4, p = 1/sqrt(2) is the line x1 + x2 = 1, i.e. x2 = -x1 + 1.
  const auto c = to_inhomogeneous(AngleOffset{kPi / 4.0, 1.0 / std::sqrt(2.0)});
  EXPECT_NEAR(c.beta, -1.0, 1e-15);
  EXPECT_NEAR(c.q, -1.0, 1e-15);
}

TEST(NormalizeRadon, Examples) {
  EXPECT_EQ(normalize_radon(2.0, Homogeneous{0.0, 1.0, 0.0}), 2.0);
  EXPECT_EQ(normalize_radon(2.0, Homogeneous{0.0, 2.0, 0.0}), 1.0);
  EXPECT_THROW(normalize_radon(2.0, Homogeneous{0.0, 0.0, 1.0}), InvalidParameter);
}

TEST(NormalizeRadon, HomogeneityOnDisk) {
  const auto disk = make_disk(1.0);
  const double lambda = 3.0;
  for_all(20, 21, [&](Gen& g) {
    const double theta = g.uniform(0.0, kPi), p = g.uniform(-1.2, 1.2);
    const double r = radon_analytic(disk, theta, p);
    const Homogeneous unit = to_homogeneous({theta, p});
    const Homogeneous scaled{lambda * unit.a1, lambda * unit.a2, lambda * unit.p};
    // The scaled triple names the same line, so R is unchanged.
    EXPECT_NEAR(normalize_radon(r, scaled), normalize_radon(r, unit) / lambda, 1e-15);
  });
}

TEST(ChartProperty, AngleOffsetRoundTrip) {
  for_all(200, 22, [](Gen& g) {
    const double theta = g.uniform(0.05, kPi - 0.05), p = g.uniform(-3.0, 3.0);
    const auto back = to_angle_offset(to_inhomogeneous(to_homogeneous({theta, p})));
    EXPECT_NEAR(back.theta, theta, 1e-12);
    EXPECT_NEAR(back.p, p, 1e-12);
  });
}

TEST(ChartProperty, SwappedChartRoundTrip) {
  for_all(200, 23, [](Gen& g) {
    const double theta = g.uniform(-kPi / 2 + 0.05, kPi / 2 - 0.05), p = g.uniform(-3.0, 3.0);
    const auto back = to_angle_offset(to_inhomogeneous(AngleOffset{theta, p}, Chart::B), Chart::B);
    EXPECT_NEAR(back.theta, theta, 1e-12);
    EXPECT_NEAR(back.p, p, 1e-12);
  });
}

TEST(ChartProperty, ScaleInvariance) {
  for_all(100, 24, [](Gen& g) {
    const Homogeneous h{g.uniform(-2, 2), g.sign() * g.uniform(0.1, 2), g.uniform(-2, 2)};
    const double lambda = g.sign() * g.uniform(1e-3, 1e3);
    const auto a = to_inhomogeneous(h);
    const auto b = to_inhomogeneous(Homogeneous{lambda * h.a1, lambda * h.a2, lambda * h.p});
    EXPECT_NEAR(a.beta, b.beta, 1e-12 * (1 + std::abs(a.beta)));
    EXPECT_NEAR(a.q, b.q, 1e-12 * (1 + std::abs(a.q)));
  });
}

TEST(ChartProperty, NormalizeThenScaleIsIdentity) {
  for_all(100, 25, [](Gen& g) {
    const Homogeneous h{g.uniform(-5, 5), g.uniform(-5, 5), g.uniform(-5, 5)};
    if (std::hypot(h.a1, h.a2) < 1e-6) return;
    const double v = g.uniform(0, 10);
    EXPECT_NEAR(normalize_radon(v, h) * std::hypot(h.a1, h.a2), v, 1e-12 * (1 + v));
  });
}

TEST(ChartProperty, InhomogeneousLineContainsItsPoints) {
  for_all(100, 26, [](Gen& g) {
    const double theta = g.uniform(0.1, kPi - 0.1), p = g.uniform(-2, 2);
    const auto c = to_inhomogeneous(AngleOffset{theta, p});
    const double x1 = g.uniform(-3, 3);
    const double x2 = c.beta * x1 - c.q;
    EXPECT_NEAR(x1 * std::cos(theta) + x2 * std::sin(theta), p, 1e-9 * (1 + std::abs(c.beta)));
  });
}

TEST(ChartToPlane, SwapsOnlyInChartB) {
  const Point2 x{0.25, -0.75};
  EXPECT_EQ(chart_to_plane(x, Chart::A), x);
  EXPECT_EQ(chart_to_plane(x, Chart::B), (Point2{-0.75, 0.25}));
  EXPECT_EQ(plane_to_chart(chart_to_plane(x, Chart::B), Chart::B), x);
}
