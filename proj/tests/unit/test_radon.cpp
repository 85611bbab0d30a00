#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "property.hpp"
#include "radon_edges/errors.hpp"
#include "radon_edges/phantom.hpp"
#include "radon_edges/radon.hpp"

using namespace radon_edges;
using radon_edges::test_support::for_all;
using radon_edges::test_support::Gen;

namespace {

Phantom custom_disk() {
  auto pieces = make_disk(1.0).pieces();
  return Phantom::from_pieces(pieces);
}

// Integral of the chord length over p, which must equal the area.
double mass(const Phantom& ph, double theta) {
  const double r = ph.support_radius();
  // Split at the kinks so the quadrature sees smooth pieces.
  std::vector<double> knots{-r, r};
  for (const auto& c : ph.corners())
    knots.push_back(c.point.x * std::cos(theta) + c.point.y * std::sin(theta));
  for (double v : ph.parameters()) {
    if (ph.shape() == PhantomShape::Disk || ph.shape() == PhantomShape::Annulus) {
      knots.push_back(v);
      knots.push_back(-v);
    }
  }
  if (ph.shape() == PhantomShape::ParabolaRegion) {
    // Tangency of the lower arc: the smallest p over the arc, plus the top edge.
    knots.push_back(0.0);
    const double c = std::cos(theta), s = std::sin(theta);
    if (s > 1e-12) {
      const double x = std::clamp(-c / (2.0 * s), -1.0, 1.0);
      knots.push_back(x * c + (x * x - 1.0) * s);
    }
  }
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double lo = std::max(knots[i], -r), hi = std::min(knots[i + 1], r);
    if (!(hi > lo)) continue;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double p) { return radon_analytic(ph, theta, p); }, lo, hi, 15, 1e-13);
  }
  return total;
}

}  // namespace

TEST(RadonAnalytic, DiskChords) {
  const auto d = make_disk(1.0);
  EXPECT_DOUBLE_EQ(radon_analytic(d, 0.3, 0.0), 2.0);
  EXPECT_NEAR(radon_analytic(d, 1.1, 0.6), 1.6, 1e-15);
  EXPECT_EQ(radon_analytic(d, 0.0, 1.0), 0.0);
  EXPECT_EQ(radon_analytic(d, 2.0, -1.5), 0.0);
}

TEST(RadonAnalytic, AnnulusSubtractsInnerChord) {
  const auto a = make_annulus(1.0, 2.0);
  EXPECT_NEAR(radon_analytic(a, 0.0, 0.0), 2.0, 1e-15);
  EXPECT_NEAR(radon_analytic(a, 0.7, 1.5), 2.0 * std::sqrt(4.0 - 2.25), 1e-15);
}

TEST(RadonAnalytic, UnitSquareCentralVerticalChord) {
  const auto sq = make_polygon(test_support::unit_square());
  EXPECT_NEAR(radon_analytic(sq, 0.0, 0.5), 1.0, 1e-14);
  EXPECT_NEAR(radon_analytic(sq, kPi / 4, 1.0 / std::sqrt(2.0)), std::sqrt(2.0), 1e-12);
}

TEST(RadonAnalytic, ParabolaHorizontalChord) {
  const auto pr = make_parabola_region();
  // x2 = -0.75 meets x2 = x1^2 - 1 at x1 = +-0.5.
  EXPECT_NEAR(radon_analytic(pr, kPi / 2, -0.75), 1.0, 1e-12);
  EXPECT_EQ(radon_analytic(pr, kPi / 2, 0.5), 0.0);
}

TEST(RadonAnalytic, CustomPhantomIsNotImplemented) {
  EXPECT_THROW(radon_analytic(custom_disk(), 0.0, 0.0), NotImplemented);
}

TEST(RadonAnalytic, PolygonMatchesClippingOracle) {
  const std::vector<Point2> pentagon{{1, 0}, {0.3, 0.95}, {-0.8, 0.6}, {-0.8, -0.6}, {0.3, -0.95}};
  const auto ph = make_polygon(pentagon);
  for_all(500, 31, [&](Gen& g) {
    const double theta = g.uniform(0.0, kPi), p = g.uniform(-1.1, 1.1);
    EXPECT_NEAR(radon_analytic(ph, theta, p), test_support::convex_polygon_chord(pentagon, theta, p), 1e-12);
  });
}

TEST(RadonAnalytic, ParabolaMatchesIntervalOracle) {
  const auto ph = make_parabola_region();
  for_all(500, 32, [&](Gen& g) {
    const double theta = g.uniform(0.0, kPi), p = g.uniform(-1.3, 1.3);
    EXPECT_NEAR(radon_analytic(ph, theta, p), test_support::parabola_region_chord(theta, p), 1e-10);
  });
}

TEST(RadonNumeric, AgreesWithAnalytic) {
  const auto sq = make_polygon(test_support::unit_square());
  const auto pr = make_parabola_region();
  for_all(50, 33, [&](Gen& g) {
    const double theta = g.uniform(0.0, kPi), p = g.uniform(-1.2, 1.2);
    EXPECT_NEAR(radon_numeric(pr, theta, p, 1e-4), radon_analytic(pr, theta, p), 5e-4);
    EXPECT_NEAR(radon_numeric(sq, theta, p, 1e-4), radon_analytic(sq, theta, p), 5e-4);
  });
}

TEST(RadonNumeric, CustomDisk) {
  EXPECT_NEAR(radon_numeric(custom_disk(), 0.4, 0.6, 1e-4), 1.6, 5e-4);
}

TEST(RadonNumeric, ZeroOutsideBoundingBox) {
  const auto d = make_disk(1.0);
  EXPECT_EQ(radon_numeric(d, 0.0, 1.5, 1e-3), 0.0);
  EXPECT_EQ(radon_numeric(d, 1.0, -3.0, 1e-3), 0.0);
}

TEST(RadonNumeric, RejectsNonPositiveStep) {
  const auto d = make_disk(1.0);
  EXPECT_THROW(radon_numeric(d, 0.0, 0.0, 0.0), InvalidParameter);
  EXPECT_THROW(radon_numeric(d, 0.0, 0.0, -1e-3), InvalidParameter);
}

TEST(MakeSinogram, GridShape) {
  const auto s = make_sinogram(make_disk(1.0), 180, 512);
  EXPECT_EQ(s.n_theta(), 180u);
  EXPECT_EQ(s.n_p(), 512u);
  EXPECT_EQ(s.values.size(), 180u * 512u);
  EXPECT_EQ(s.theta_grid.front(), 0.0);
  EXPECT_LT(s.theta_grid.back(), kPi);
  EXPECT_NEAR(s.p_grid.front(), -1.2, 1e-15);
  EXPECT_EQ(s.p_grid.back(), 1.2);
  EXPECT_FALSE(s.coverage_warning);
  EXPECT_NO_THROW(s.validate());
}

TEST(MakeSinogram, RejectsTinyGrids) {
  const auto d = make_disk(1.0);
  EXPECT_THROW(make_sinogram(d, 180, 4), InvalidParameter);
  EXPECT_THROW(make_sinogram(d, 1, 64), InvalidParameter);
  EXPECT_THROW(make_sinogram(d, 8, 64, PRange{1.0, 1.0}), InvalidParameter);
  EXPECT_THROW(make_sinogram(d, 8, 64, std::nullopt, NoiseSpec{NoiseModel::Uniform, -1.0, 0}), InvalidParameter);
}

TEST(MakeSinogram, ColumnMaximaOfUnitDisk) {
  const auto s = make_sinogram(make_disk(1.0), 12, 301, PRange{-1.5, 1.5});
  for (std::size_t i = 0; i < s.n_theta(); ++i) {
    const auto col = s.column(i);
    EXPECT_NEAR(*std::max_element(col.begin(), col.end()), 2.0, 1e-12);
  }
}

TEST(MakeSinogram, CoverageWarning) {
  EXPECT_TRUE(make_sinogram(make_disk(1.0), 8, 64, PRange{-0.5, 0.5}).coverage_warning);
  EXPECT_FALSE(make_sinogram(make_disk(1.0), 8, 64, PRange{-1.0, 1.0}).coverage_warning);
}

TEST(MakeSinogram, NoiseIsSeededAndBounded) {
  const auto ph = make_parabola_region();
  const NoiseSpec noise{NoiseModel::Uniform, 1e-3, 42};
  const auto clean = make_sinogram(ph, 30, 128);
  const auto a = make_sinogram(ph, 30, 128, std::nullopt, noise);
  const auto b = make_sinogram(ph, 30, 128, std::nullopt, noise);
  EXPECT_EQ(a.values, b.values);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, std::abs(a.values[k] - clean.values[k]));
  EXPECT_LE(worst, 1e-3);
  EXPECT_GT(worst, 5e-4);
  auto other = noise;
  other.seed = 43;
  EXPECT_NE(make_sinogram(ph, 30, 128, std::nullopt, other).values, a.values);
}

TEST(MakeSinogram, GaussianNoiseHasRequestedSpread) {
  const auto ph = make_disk(1.0);
  const auto clean = make_sinogram(ph, 40, 256);
  const auto noisy = make_sinogram(ph, 40, 256, std::nullopt, NoiseSpec{NoiseModel::Gaussian, 1e-2, 7});
  double ss = 0.0;
  for (std::size_t k = 0; k < clean.values.size(); ++k) ss += std::pow(noisy.values[k] - clean.values[k], 2);
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(clean.values.size())), 1e-2, 5e-4);
}

TEST(Validate, RejectsBrokenGrids) {
  auto s = make_sinogram(make_disk(1.0), 8, 16);
  s.p_grid[3] += 1e-3;
  EXPECT_THROW(s.validate(), InvalidParameter);
  s = make_sinogram(make_disk(1.0), 8, 16);
  s.values.pop_back();
  EXPECT_THROW(s.validate(), InvalidParameter);
  s = make_sinogram(make_disk(1.0), 8, 16);
  s.values[5] = std::nan("");
  EXPECT_THROW(s.validate(), InvalidParameter);
}

TEST(RadonProperty, EvenInLineOrientation) {
  // (theta + pi, -p) names the same line.
  for (const auto& ph : {make_parabola_region(), make_polygon(test_support::unit_square()), make_annulus(0.5, 1.0)})
    for_all(200, 34, [&](Gen& g) {
      const double theta = g.uniform(0.0, kPi), p = g.uniform(-1.5, 1.5);
      EXPECT_NEAR(radon_analytic(ph, theta + kPi, -p), radon_analytic(ph, theta, p), 1e-12);
    });
}

TEST(RadonProperty, MassEqualsArea) {
  const std::vector<Point2> tri{{0, 0}, {2, 0}, {0.5, 1.5}};
  for (const auto& ph : {make_disk(1.0), make_annulus(1.0, 2.0), make_parabola_region(),
                         make_polygon(test_support::unit_square()), make_polygon(tri)})
    for_all(5, 35, [&](Gen& g) { EXPECT_NEAR(mass(ph, g.uniform(0.0, kPi)), ph.area(), 1e-6); });
}

TEST(RadonProperty, NonNegativeAndBoundedByDiameter) {
  const auto ph = make_parabola_region();
  for_all(500, 36, [&](Gen& g) {
    const double v = radon_analytic(ph, g.uniform(0.0, kPi), g.uniform(-2.0, 2.0));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0 * ph.support_radius() + 1e-12);
  });
}
