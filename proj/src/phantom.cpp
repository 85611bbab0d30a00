#include "radon_edges/phantom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "radon_edges/errors.hpp"

namespace radon_edges {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Point2 unit(Point2 v) {
  const double n = norm(v);
  return {v.x / n, v.y / n};
}

// Real roots of a*t^2 + b*t + c = 0, degenerate cases included.
void quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return;
  if (std::abs(a) <= 1e-14 * scale) {
    if (b != 0.0) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(s, b));
  if (q == 0.0) {
    out.push_back(0.0);
    return;
  }
  out.push_back(q / a);
  out.push_back(c / q);
}

double circle_y(const CircleArc& c, double x1) {
  const double dx = x1 - c.center.x;
  const double h = std::sqrt(std::max(0.0, c.radius * c.radius - dx * dx));
  return c.upper ? c.center.y + h : c.center.y - h;
}

// Golden-section minimization of squared distance to a parabola arc, seeded
// from a coarse scan.
double parabola_distance(const ParabolaArc& arc, Point2 x) {
  auto dist2 = [&](double t) {
    const double dx = t - x.x;
    const double dy = arc(t) - x.y;
    return dx * dx + dy * dy;
  };
  constexpr int kScan = 64;
  const double h = (arc.x_hi - arc.x_lo) / kScan;
  int best = 0;
  double best_val = dist2(arc.x_lo);
  for (int i = 1; i <= kScan; ++i) {
    const double v = dist2(arc.x_lo + i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = arc.x_lo + std::max(0, best - 1) * h;
  double hi = arc.x_lo + std::min(kScan, best + 1) * h;
  constexpr double kInvPhi = 0.6180339887498949;
  double m1 = hi - kInvPhi * (hi - lo);
  double m2 = lo + kInvPhi * (hi - lo);
  double f1 = dist2(m1);
  double f2 = dist2(m2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    if (f1 < f2) {
      hi = m2;
      m2 = m1;
      f2 = f1;
      m1 = hi - kInvPhi * (hi - lo);
      f1 = dist2(m1);
    } else {
      lo = m1;
      m1 = m2;
      f1 = f2;
      m2 = lo + kInvPhi * (hi - lo);
      f2 = dist2(m2);
    }
  }
  return std::sqrt(std::min({best_val, f1, f2}));
}

double parabola_speed(const ParabolaArc& arc, double t) { return std::hypot(1.0, arc.slope(t)); }

}  // namespace

BoundaryPiece::BoundaryPiece(Shape shape, bool region_left)
    : shape_(std::move(shape)), region_left_(region_left) {
  std::visit(Overloaded{
                 [](const CircleArc& c) {
                   if (!(c.radius > 0.0) || !std::isfinite(c.radius))
                     throw InvalidParameter("circle-arc radius must be positive");
                 },
                 [](const ParabolaArc& p) {
                   if (!(p.x_hi > p.x_lo))
                     throw InvalidParameter("parabola-arc interval must have positive length");
                 },
                 [](const LineSegment& s) {
                   if (s.a == s.b) throw InvalidParameter("line-segment endpoints must be distinct");
                 },
             },
             shape_);
}

PieceKind BoundaryPiece::kind() const {
  return std::visit(Overloaded{
                        [](const CircleArc&) { return PieceKind::CircleArc; },
                        [](const ParabolaArc&) { return PieceKind::ParabolaArc; },
                        [](const LineSegment&) { return PieceKind::LineSegment; },
                    },
                    shape_);
}

Point2 BoundaryPiece::start() const {
  return std::visit(Overloaded{
                        [](const CircleArc& c) { return Point2{c.center.x - c.radius, c.center.y}; },
                        [](const ParabolaArc& p) { return Point2{p.x_lo, p(p.x_lo)}; },
                        [](const LineSegment& s) { return s.a; },
                    },
                    shape_);
}

Point2 BoundaryPiece::end() const {
  return std::visit(Overloaded{
                        [](const CircleArc& c) { return Point2{c.center.x + c.radius, c.center.y}; },
                        [](const ParabolaArc& p) { return Point2{p.x_hi, p(p.x_hi)}; },
                        [](const LineSegment& s) { return s.b; },
                    },
                    shape_);
}

Point2 BoundaryPiece::tangent_at_start() const {
  return std::visit(Overloaded{
                        [](const CircleArc& c) { return Point2{0.0, c.upper ? 1.0 : -1.0}; },
                        [](const ParabolaArc& p) { return unit({1.0, p.slope(p.x_lo)}); },
                        [](const LineSegment& s) { return unit(s.b - s.a); },
                    },
                    shape_);
}

Point2 BoundaryPiece::tangent_at_end() const {
  return std::visit(Overloaded{
                        [](const CircleArc& c) { return Point2{0.0, c.upper ? -1.0 : 1.0}; },
                        [](const ParabolaArc& p) { return unit({1.0, p.slope(p.x_hi)}); },
                        [](const LineSegment& s) { return unit(s.b - s.a); },
                    },
                    shape_);
}

Box BoundaryPiece::bounds() const {
  return std::visit(
      Overloaded{
          [](const CircleArc& c) {
            const double r = c.radius;
            return c.upper ? Box{{c.center.x - r, c.center.y}, {c.center.x + r, c.center.y + r}}
                           : Box{{c.center.x - r, c.center.y - r}, {c.center.x + r, c.center.y}};
          },
          [](const ParabolaArc& p) {
            double lo = std::min(p(p.x_lo), p(p.x_hi));
            double hi = std::max(p(p.x_lo), p(p.x_hi));
            if (p.c2 != 0.0) {
              const double v = -p.c1 / (2.0 * p.c2);
              if (v > p.x_lo && v < p.x_hi) {
                lo = std::min(lo, p(v));
                hi = std::max(hi, p(v));
              }
            }
            return Box{{p.x_lo, lo}, {p.x_hi, hi}};
          },
          [](const LineSegment& s) {
            return Box{{std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)},
                       {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)}};
          },
      },
      shape_);
}

double BoundaryPiece::distance(Point2 x) const {
  return std::visit(Overloaded{
                        [&](const CircleArc& c) {
                          const bool on_half = c.upper ? x.y >= c.center.y : x.y <= c.center.y;
                          if (on_half) return std::abs(radon_edges::distance(x, c.center) - c.radius);
                          return std::min(radon_edges::distance(x, start()),
                                          radon_edges::distance(x, end()));
                        },
                        [&](const ParabolaArc& p) { return parabola_distance(p, x); },
                        [&](const LineSegment& s) { return distance_to_segment(x, s.a, s.b); },
                    },
                    shape_);
}

double BoundaryPiece::length() const {
  return std::visit(Overloaded{
                        [](const CircleArc& c) { return kPi * c.radius; },
                        [](const ParabolaArc& p) {
                          // Simpson on the smooth speed function.
                          constexpr int n = 2048;
                          const double h = (p.x_hi - p.x_lo) / n;
                          double s = parabola_speed(p, p.x_lo) + parabola_speed(p, p.x_hi);
                          for (int i = 1; i < n; ++i)
                            s += (i % 2 ? 4.0 : 2.0) * parabola_speed(p, p.x_lo + i * h);
                          return s * h / 3.0;
                        },
                        [](const LineSegment& s) { return radon_edges::distance(s.a, s.b); },
                    },
                    shape_);
}

int BoundaryPiece::crossings_above(Point2 x) const {
  return std::visit(Overloaded{
                        [&](const CircleArc& c) {
                          if (x.x < c.center.x - c.radius || x.x >= c.center.x + c.radius) return 0;
                          return circle_y(c, x.x) > x.y ? 1 : 0;
                        },
                        [&](const ParabolaArc& p) {
                          if (x.x < p.x_lo || x.x >= p.x_hi) return 0;
                          return p(x.x) > x.y ? 1 : 0;
                        },
                        [&](const LineSegment& s) {
                          const Point2 lo = s.a.x < s.b.x ? s.a : s.b;
                          const Point2 hi = s.a.x < s.b.x ? s.b : s.a;
                          if (lo.x == hi.x || x.x < lo.x || x.x >= hi.x) return 0;
                          const double y = lo.y + (hi.y - lo.y) * (x.x - lo.x) / (hi.x - lo.x);
                          return y > x.y ? 1 : 0;
                        },
                    },
                    shape_);
}

void BoundaryPiece::line_intersections(Point2 base, Point2 dir, std::vector<double>& out) const {
  std::visit(Overloaded{
                 [&](const CircleArc& c) {
                   const Point2 rel = base - c.center;
                   const double dd = dot(dir, dir);
                   std::vector<double> roots;
                   quadratic_roots(dd, 2.0 * dot(dir, rel), dot(rel, rel) - c.radius * c.radius, roots);
                   for (double t : roots) {
                     const double y = base.y + t * dir.y - c.center.y;
                     const double tol = 1e-12 * c.radius;
                     if (c.upper ? y >= -tol : y <= tol) out.push_back(t);
                   }
                 },
                 [&](const ParabolaArc& p) {
                   std::vector<double> roots;
                   quadratic_roots(p.c2 * dir.x * dir.x,
                                   2.0 * p.c2 * base.x * dir.x + p.c1 * dir.x - dir.y,
                                   p(base.x) - base.y, roots);
                   const double tol = 1e-12 * (1.0 + p.x_hi - p.x_lo);
                   for (double t : roots) {
                     const double x1 = base.x + t * dir.x;
                     if (x1 >= p.x_lo - tol && x1 <= p.x_hi + tol) out.push_back(t);
                   }
                 },
                 [&](const LineSegment& s) {
                   const Point2 e = s.b - s.a;
                   const double den = cross(dir, e);
                   if (den == 0.0) return;
                   const Point2 w = s.a - base;
                   const double t = cross(w, e) / den;
                   const double u = cross(w, dir) / den;
                   if (u >= -1e-12 && u <= 1.0 + 1e-12) out.push_back(t);
                 },
             },
             shape_);
}

std::vector<Point2> BoundaryPiece::sample(std::size_t count) const {
  count = std::max<std::size_t>(count, 2);
  std::vector<Point2> pts;
  pts.reserve(count);
  std::visit(Overloaded{
                 [&](const CircleArc& c) {
                   // Traversal runs from angle pi towards 0 (upper) or 2*pi (lower).
                   for (std::size_t i = 0; i < count; ++i) {
                     const double s = static_cast<double>(i) / (count - 1);
                     const double phi = c.upper ? kPi * (1.0 - s) : kPi * (1.0 + s);
                     pts.push_back({c.center.x + c.radius * std::cos(phi),
                                    c.center.y + c.radius * std::sin(phi)});
                   }
                 },
                 [&](const ParabolaArc& p) {
                   constexpr int n = 4096;
                   std::vector<double> cum(n + 1, 0.0);
                   const double h = (p.x_hi - p.x_lo) / n;
                   for (int i = 0; i < n; ++i)
                     cum[i + 1] = cum[i] + h * parabola_speed(p, p.x_lo + (i + 0.5) * h);
                   for (std::size_t k = 0; k < count; ++k) {
                     const double target = cum[n] * static_cast<double>(k) / (count - 1);
                     const auto it = std::lower_bound(cum.begin(), cum.end(), target);
                     const auto i = std::clamp<std::ptrdiff_t>(it - cum.begin(), 1, n);
                     const double frac = (target - cum[i - 1]) / (cum[i] - cum[i - 1]);
                     const double x1 = p.x_lo + (i - 1 + frac) * h;
                     pts.push_back({x1, p(x1)});
                   }
                 },
                 [&](const LineSegment& s) {
                   for (std::size_t i = 0; i < count; ++i) {
                     const double t = static_cast<double>(i) / (count - 1);
                     pts.push_back(s.a + t * (s.b - s.a));
                   }
                 },
             },
             shape_);
  return pts;
}

Phantom Phantom::from_pieces(std::vector<BoundaryPiece> pieces, PhantomShape shape,
                             std::vector<double> parameters) {
  if (pieces.empty()) throw InvalidParameter("phantom needs at least one boundary piece");
  Phantom ph;
  ph.shape_ = shape;
  ph.parameters_ = std::move(parameters);
  ph.pieces_ = std::move(pieces);

  Box b = ph.pieces_.front().bounds();
  for (const auto& piece : ph.pieces_) {
    const Box pb = piece.bounds();
    b.lo = {std::min(b.lo.x, pb.lo.x), std::min(b.lo.y, pb.lo.y)};
    b.hi = {std::max(b.hi.x, pb.hi.x), std::max(b.hi.y, pb.hi.y)};
  }
  ph.bounds_ = b;
  const double scale = std::max({1.0, std::abs(b.lo.x), std::abs(b.lo.y), std::abs(b.hi.x), std::abs(b.hi.y)});
  const double tol = kBoundaryTolerance * scale;

  // Closure: every endpoint is shared with exactly one endpoint of another piece.
  struct End {
    Point2 point;
    Point2 tangent;
    std::size_t piece;
  };
  std::vector<End> ends;
  for (std::size_t i = 0; i < ph.pieces_.size(); ++i) {
    ends.push_back({ph.pieces_[i].start(), ph.pieces_[i].tangent_at_start(), i});
    ends.push_back({ph.pieces_[i].end(), ph.pieces_[i].tangent_at_end(), i});
  }
  for (std::size_t i = 0; i < ends.size(); ++i) {
    int matches = 0;
    std::size_t partner = 0;
    for (std::size_t j = 0; j < ends.size(); ++j) {
      if (ends[j].piece == ends[i].piece) continue;
      if (distance(ends[i].point, ends[j].point) <= tol) {
        ++matches;
        partner = j;
      }
    }
    if (matches != 1)
      throw InvalidParameter("boundary is not closed: endpoint of piece " + std::to_string(ends[i].piece) +
                             " is shared with " + std::to_string(matches) + " other endpoints");
    if (partner < i) continue;
    if (std::abs(cross(ends[i].tangent, ends[partner].tangent)) > 1e-9)
      ph.corners_.push_back({ends[i].point, ends[i].piece, ends[partner].piece});
  }

  ph.support_radius_ = 0.0;
  for (const auto& piece : ph.pieces_) {
    std::visit(Overloaded{
                   [&](const CircleArc& c) {
                     ph.support_radius_ = std::max(ph.support_radius_, norm(c.center) + c.radius);
                   },
                   [&](const ParabolaArc&) {
                     for (const Point2& q : piece.sample(2049))
                       ph.support_radius_ = std::max(ph.support_radius_, norm(q));
                   },
                   [&](const LineSegment& s) {
                     ph.support_radius_ = std::max({ph.support_radius_, norm(s.a), norm(s.b)});
                   },
               },
               piece.shape());
  }
  return ph;
}

bool Phantom::contains(Point2 x) const {
  int crossings = 0;
  for (const auto& piece : pieces_) crossings += piece.crossings_above(x);
  return crossings % 2 == 1;
}

Membership Phantom::classify(Point2 x) const {
  for (const auto& piece : pieces_)
    if (piece.distance(x) <= kBoundaryTolerance) return Membership::Boundary;
  return contains(x) ? Membership::Inside : Membership::Outside;
}

double Phantom::area() const {
  // Green's theorem, (x dy - y dx)/2 along each piece, signed by region side.
  double total = 0.0;
  for (const auto& piece : pieces_) {
    const double sign = piece.region_left() ? 1.0 : -1.0;
    const double part = std::visit(
        Overloaded{
            [](const CircleArc& c) {
              const double r = c.radius;
              return c.upper ? 0.5 * (-kPi * r * r - 2.0 * r * c.center.y)
                             : 0.5 * (kPi * r * r - 2.0 * r * c.center.y);
            },
            [](const ParabolaArc& p) {
              auto prim = [&](double t) { return p.c2 * t * t * t / 3.0 - p.c0 * t; };
              return 0.5 * (prim(p.x_hi) - prim(p.x_lo));
            },
            [](const LineSegment& s) { return 0.5 * cross(s.a, s.b); },
        },
        piece.shape());
    total += sign * part;
  }
  return total;
}

Phantom make_disk(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidParameter("disk radius 'a' must be positive");
  std::vector<BoundaryPiece> pieces{
      BoundaryPiece{CircleArc{{0.0, 0.0}, a, true}, false},
      BoundaryPiece{CircleArc{{0.0, 0.0}, a, false}, true},
  };
  return Phantom::from_pieces(std::move(pieces), PhantomShape::Disk, {a});
}

Phantom make_annulus(double b, double a) {
  if (!(b > 0.0) || !std::isfinite(a) || !(b < a))
    throw InvalidParameter("annulus radii must satisfy 0 < b < a");
  std::vector<BoundaryPiece> pieces{
      BoundaryPiece{CircleArc{{0.0, 0.0}, a, true}, false},
      BoundaryPiece{CircleArc{{0.0, 0.0}, a, false}, true},
      BoundaryPiece{CircleArc{{0.0, 0.0}, b, true}, true},
      BoundaryPiece{CircleArc{{0.0, 0.0}, b, false}, false},
  };
  return Phantom::from_pieces(std::move(pieces), PhantomShape::Annulus, {b, a});
}

Phantom make_parabola_region() {
  std::vector<BoundaryPiece> pieces{
      BoundaryPiece{ParabolaArc{1.0, 0.0, -1.0, -1.0, 1.0}, true},
      BoundaryPiece{LineSegment{{-1.0, 0.0}, {1.0, 0.0}}, false},
  };
  return Phantom::from_pieces(std::move(pieces), PhantomShape::ParabolaRegion);
}

namespace {

bool segments_touch(Point2 a, Point2 b, Point2 c, Point2 d) {
  auto orient = [](Point2 p, Point2 q, Point2 r) {
    const double v = cross(q - p, r - p);
    return (v > 0.0) - (v < 0.0);
  };
  auto on_segment = [](Point2 p, Point2 q, Point2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  const int o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

}  // namespace

Phantom make_polygon(std::span<const Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) throw InvalidParameter("polygon needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices[i], b = vertices[(i + 1) % n];
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw InvalidParameter("polygon vertex is not finite");
    if (a == b) throw InvalidParameter("polygon has repeated consecutive vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices[i], b = vertices[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point2 c = vertices[j], d = vertices[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) {
        // Shared vertex is fine; folding back onto the previous edge is not.
        const Point2 u = b - a, v = d - c;
        if (cross(u, v) == 0.0 && dot(u, v) < 0.0) throw InvalidParameter("polygon is self-intersecting");
        continue;
      }
      if (segments_touch(a, b, c, d)) throw InvalidParameter("polygon is self-intersecting");
    }
  }
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) twice_area += cross(vertices[i], vertices[(i + 1) % n]);
  if (twice_area == 0.0) throw InvalidParameter("polygon has zero area");
  const bool ccw = twice_area > 0.0;

  std::vector<BoundaryPiece> pieces;
  std::vector<double> params;
  for (std::size_t i = 0; i < n; ++i) {
    pieces.emplace_back(LineSegment{vertices[i], vertices[(i + 1) % n]}, ccw);
    params.push_back(vertices[i].x);
    params.push_back(vertices[i].y);
  }
  auto ph = Phantom::from_pieces(std::move(pieces), PhantomShape::Polygon, std::move(params));
  if (ph.corners().size() != n) throw InvalidParameter("polygon has collinear consecutive edges");
  return ph;
}

const char* to_string(PieceKind kind) {
  switch (kind) {
    case PieceKind::CircleArc: return "circle-arc";
    case PieceKind::ParabolaArc: return "parabola-arc";
    case PieceKind::LineSegment: return "line-segment";
  }
  return "unknown";
}

const char* to_string(PhantomShape shape) {
  switch (shape) {
    case PhantomShape::Disk: return "disk";
    case PhantomShape::Annulus: return "annulus";
    case PhantomShape::ParabolaRegion: return "parabola";
    case PhantomShape::Polygon: return "polygon";
    case PhantomShape::Custom: return "custom";
  }
  return "unknown";
}

}  // namespace radon_edges
