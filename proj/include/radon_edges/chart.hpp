#pragma once

#include "radon_edges/geometry.hpp"

namespace radon_edges {

// Lines in the plane as points of projective line-space.
//
// Conventions:
//   homogeneous  (a1 : a2 : p)   line a1*x1 + a2*x2 = p
//   angle-offset (theta, p)      line x . (cos theta, sin theta) = p
//   chart A      (beta, q)       line x2 = beta*x1 - q, requires a2 != 0
//   chart B      (beta, q)       line x1 = beta*x2 - q, requires a1 != 0
//
// Chart B is chart A with the roles of x1 and x2 exchanged; it covers the
// near-vertical lines that chart A excludes.

struct Homogeneous {
  double a1 = 0.0;
  double a2 = 0.0;
  double p = 0.0;
};

struct AngleOffset {
  double theta = 0.0;
  double p = 0.0;
};

struct Inhomogeneous {
  double beta = 0.0;
  double q = 0.0;
};

enum class Chart { A, B };

const char* to_string(Chart chart);
Chart chart_from_string(const char* name);

Homogeneous to_homogeneous(AngleOffset line);

// Throws ChartExcluded when the line is parallel to the chart's excluded axis.
Inhomogeneous to_inhomogeneous(Homogeneous line, Chart chart = Chart::A);
Inhomogeneous to_inhomogeneous(AngleOffset line, Chart chart = Chart::A);

// Inverse of to_inhomogeneous with theta in (0, pi) for chart A and in
// (-pi/2, pi/2) for chart B.
AngleOffset to_angle_offset(Inhomogeneous line, Chart chart = Chart::A);

// Exchanges x1 and x2; maps chart-local coordinates to the plane and back.
inline Point2 chart_to_plane(Point2 local, Chart chart) {
  return chart == Chart::A ? local : Point2{local.y, local.x};
}
inline Point2 plane_to_chart(Point2 x, Chart chart) { return chart_to_plane(x, chart); }

// R(p, alpha) = |alpha| * f^(p, alpha): converts an integral over the line
// with Lebesgue measure into the delta-function normalization.
double normalize_radon(double value, Homogeneous line);

}  // namespace radon_edges
