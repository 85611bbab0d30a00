#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "radon_edges/geometry.hpp"

namespace radon_edges {

// Tolerance (in phantom length units) for boundary classification.
inline constexpr double kBoundaryTolerance = 1e-9;

// Half of the circle |x - center| = radius, written as a graph over x1.
struct CircleArc {
  Point2 center;
  double radius = 1.0;
  bool upper = true;
};

// Graph x2 = c2*x1^2 + c1*x1 + c0 over [x_lo, x_hi].
struct ParabolaArc {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;
  double x_lo = 0.0;
  double x_hi = 1.0;

  double operator()(double x1) const { return (c2 * x1 + c1) * x1 + c0; }
  double slope(double x1) const { return 2.0 * c2 * x1 + c1; }
};

struct LineSegment {
  Point2 a;
  Point2 b;
};

enum class PieceKind { CircleArc, ParabolaArc, LineSegment };

// One smooth piece of the boundary. Pieces are traversed with increasing
// parameter (x1 for arcs, a -> b for segments); region_left records whether
// the region lies to the left of that direction.
class BoundaryPiece {
 public:
  using Shape = std::variant<CircleArc, ParabolaArc, LineSegment>;

  BoundaryPiece(Shape shape, bool region_left);

  PieceKind kind() const;
  const Shape& shape() const { return shape_; }
  bool region_left() const { return region_left_; }

  Point2 start() const;
  Point2 end() const;
  // Unit tangent in traversal direction.
  Point2 tangent_at_start() const;
  Point2 tangent_at_end() const;

  Box bounds() const;
  double distance(Point2 x) const;
  double length() const;

  // Number of times the upward ray from x crosses this piece, using the
  // half-open x1-interval convention so shared endpoints are counted once.
  int crossings_above(Point2 x) const;

  // Parameters t where the line {base + t*dir} meets this piece.
  void line_intersections(Point2 base, Point2 dir, std::vector<double>& out) const;

  // `count` points spread along the piece by arclength (approximately for
  // parabolas), endpoints included.
  std::vector<Point2> sample(std::size_t count) const;

 private:
  Shape shape_;
  bool region_left_;
};

struct Corner {
  Point2 point;
  std::size_t piece_a = 0;
  std::size_t piece_b = 0;
};

enum class PhantomShape { Disk, Annulus, ParabolaRegion, Polygon, Custom };
enum class Membership { Inside, Outside, Boundary };

// Indicator function of a bounded region D with piecewise smooth boundary.
class Phantom {
 public:
  // Validates closure of the boundary and derives the corners (shared
  // endpoints where the tangent direction jumps).
  static Phantom from_pieces(std::vector<BoundaryPiece> pieces,
                             PhantomShape shape = PhantomShape::Custom,
                             std::vector<double> parameters = {});

  PhantomShape shape() const { return shape_; }
  // Shape parameters: disk {a}, annulus {b, a}, polygon {x0, y0, x1, y1, ...}.
  const std::vector<double>& parameters() const { return parameters_; }
  const std::vector<BoundaryPiece>& pieces() const { return pieces_; }
  const std::vector<Corner>& corners() const { return corners_; }

  Membership classify(Point2 x) const;
  // Parity test ignoring the boundary tolerance.
  bool contains(Point2 x) const;

  Box bounds() const { return bounds_; }
  // max |x| over the boundary: lines with |p| above this miss D.
  double support_radius() const { return support_radius_; }
  double area() const;

 private:
  Phantom() = default;

  PhantomShape shape_ = PhantomShape::Custom;
  std::vector<double> parameters_;
  std::vector<BoundaryPiece> pieces_;
  std::vector<Corner> corners_;
  Box bounds_;
  double support_radius_ = 0.0;
};

Phantom make_disk(double a);
Phantom make_annulus(double b, double a);
// Region between x2 = x1^2 - 1 and x2 = 0.
Phantom make_parabola_region();
Phantom make_polygon(std::span<const Point2> vertices);

inline Membership classify_point(const Phantom& phantom, Point2 x) {
  return phantom.classify(x);
}

const char* to_string(PieceKind kind);
const char* to_string(PhantomShape shape);

}  // namespace radon_edges
