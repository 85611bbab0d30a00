#include "radon_edges/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "radon_edges/errors.hpp"

namespace radon_edges {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double polyline_distance(const std::vector<Point2>& pts, Point2 x) {
  if (pts.size() == 1) return distance(pts.front(), x);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) best = std::min(best, distance_to_segment(x, pts[i], pts[i + 1]));
  return best;
}

// Symmetric Hausdorff distance between two polylines, sampled at vertices.
double polyline_hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double d = 0.0;
  for (Point2 p : a) d = std::max(d, polyline_distance(b, p));
  for (Point2 p : b) d = std::max(d, polyline_distance(a, p));
  return d;
}

// Signed offset of a chart-local point from the line x_n = beta*x' - q.
double line_offset(Inhomogeneous line, Point2 local) {
  return (line.beta * local.x - line.q - local.y) / std::hypot(1.0, line.beta);
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line fit_line(const std::vector<BranchSample>& samples) {
  double mb = 0, mq = 0;
  for (const auto& s : samples) {
    mb += s.beta;
    mq += s.q;
  }
  const double n = static_cast<double>(samples.size());
  mb /= n;
  mq /= n;
  double sbb = 0, sbq = 0;
  for (const auto& s : samples) {
    sbb += (s.beta - mb) * (s.beta - mb);
    sbq += (s.beta - mb) * (s.q - mq);
  }
  const double slope = sbb > 0 ? sbq / sbb : 0.0;
  return {slope, mq - slope * mb};
}

// Affine branches of one chart whose samples lie on a common line trace the
// same point; fragments are pooled so short pieces do not yield stray points.
// A flat branch with a fold exponent is a curved piece too short to resolve
// its curvature, not a corner.
bool point_like(const SingularBranch& b) { return b.affine && b.cls != SingularityClass::SmoothFold; }

std::vector<SurfacePatch> affine_points(const std::vector<SingularBranch>& branches, double gate) {
  std::vector<std::size_t> ids;
  for (std::size_t id = 0; id < branches.size(); ++id)
    if (point_like(branches[id]) && branches[id].samples.size() >= 3) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    return branches[a].samples.size() > branches[b].samples.size();
  });
  struct Group {
    Chart chart;
    Line line;
    std::vector<BranchSample> samples;
    std::vector<std::size_t> ids;
  };
  std::vector<Group> groups;
  for (std::size_t id : ids) {
    const auto& b = branches[id];
    auto fits = [&](const Group& g) {
      if (g.chart != b.chart) return false;
      for (const auto& s : b.samples)
        if (std::abs(s.q - (g.line.slope * s.beta + g.line.intercept)) > gate * std::hypot(1.0, s.beta)) return false;
      return true;
    };
    auto it = std::find_if(groups.begin(), groups.end(), fits);
    if (it == groups.end()) {
      groups.push_back({b.chart, fit_line(b.samples), b.samples, {id}});
    } else {
      it->samples.insert(it->samples.end(), b.samples.begin(), b.samples.end());
      it->ids.push_back(id);
    }
  }
  std::vector<SurfacePatch> out;
  for (const auto& g : groups) {
    const Line line = fit_line(g.samples);
    SurfacePatch p;
    p.kind = PatchKind::Point;
    p.chart = g.chart;
    p.point = chart_to_plane({line.slope, -line.intercept}, g.chart);
    p.provenance = g.ids;
    out.push_back(std::move(p));
  }
  return out;
}

// Looks up q at an exact sample abscissa of the sub-branch.
double q_at(const SingularBranch& branch, std::size_t first, std::size_t last, double beta) {
  double best = std::numeric_limits<double>::infinity(), q = 0.0;
  for (std::size_t k = first; k < last; ++k) {
    const double d = std::abs(branch.samples[k].beta - beta);
    if (d < best) {
      best = d;
      q = branch.samples[k].q;
    }
  }
  return q;
}

std::vector<SurfacePatch> transform_piece(const SingularBranch& branch, std::size_t first, std::size_t last,
                                          std::size_t id, double noise) {
  SampledFunction h;
  for (std::size_t k = first; k < last; ++k) {
    h.grid.push_back(branch.samples[k].beta);
    h.values.push_back(branch.samples[k].q);
  }
  h.noise = noise;
  Conjugate conj;
  try {
    conj = legendre_discrete(h);
  } catch (const NonConvexBranch&) {
    // Residual violations are outliers below the inflection gate; widen the
    // tolerance to the observed violation and let the hull absorb them.
    double worst = 0.0;
    const double sign = [&] {
      double s = 0.0;
      for (std::size_t k = 1; k + 1 < h.grid.size(); ++k) {
        const double t = (h.grid[k] - h.grid[k - 1]) / (h.grid[k + 1] - h.grid[k - 1]);
        s += h.values[k - 1] + t * (h.values[k + 1] - h.values[k - 1]) - h.values[k];
      }
      return s >= 0.0 ? 1.0 : -1.0;
    }();
    for (std::size_t k = 1; k + 1 < h.grid.size(); ++k) {
      const double t = (h.grid[k] - h.grid[k - 1]) / (h.grid[k + 1] - h.grid[k - 1]);
      const double chord = h.values[k - 1] + t * (h.values[k + 1] - h.values[k - 1]);
      worst = std::max(worst, sign * (h.values[k] - chord));
    }
    h.noise = std::max(noise, worst);
    conj = legendre_discrete(h);
  }
  if (conj.point) {
    SurfacePatch p;
    p.kind = PatchKind::Point;
    p.chart = branch.chart;
    p.point = chart_to_plane(*conj.point, branch.chart);
    p.provenance = {id};
    return {p};
  }
  SurfacePatch c;
  c.kind = PatchKind::Curve;
  c.chart = branch.chart;
  c.orientation = conj.orientation;
  c.provenance = {id};
  for (std::size_t i = 0; i < conj.function.grid.size(); ++i)
    c.samples.push_back({conj.function.grid[i], conj.function.values[i]});
  // Terminal supporting lines: the hull vertex of h not shared with the
  // neighbouring edge; both vertices when the patch has a single sample.
  const auto& sup = conj.support;
  auto terminal = [&](std::size_t end, std::size_t inner) {
    std::vector<Inhomogeneous> lines;
    for (double b : {sup[end].x_left, sup[end].x_right}) {
      const bool shared = sup.size() > 1 && (b == sup[inner].x_left || b == sup[inner].x_right);
      if (!shared) lines.push_back({b, q_at(branch, first, last, b)});
    }
    return lines;
  };
  c.end_lines[0] = terminal(0, sup.size() > 1 ? 1 : 0);
  c.end_lines[1] = terminal(sup.size() - 1, sup.size() > 1 ? sup.size() - 2 : 0);
  return {c};
}

// Whether point feature P closes the curve patch at end `end`.
bool closes_end(const SurfacePatch& curve, std::size_t end, Point2 p, double gate) {
  const auto pts = curve.plane_points();
  const Point2 e = end == 0 ? pts.front() : pts.back();
  if (distance(p, e) <= gate) return true;
  if (pts.size() < 2) return false;
  const Point2 inner = end == 0 ? pts[1] : pts[pts.size() - 2];
  const Point2 outward = e - inner;
  if (dot(p - e, outward) <= 0.0) return false;
  // Hull vertices thin out unevenly near the chart edge; take the widest of
  // the last few sample spacings.
  double spacing = 0.0;
  for (std::size_t k = 0; k < 3 && k + 1 < pts.size(); ++k) {
    const std::size_t i = end == 0 ? k : pts.size() - 1 - k;
    const std::size_t j = end == 0 ? i + 1 : i - 1;
    spacing = std::max(spacing, distance(pts[i], pts[j]));
  }
  const double reach = std::max(gate, 2.0 * spacing);
  if (distance(p, e) > reach) return false;
  const Point2 local = plane_to_chart(p, curve.chart);
  for (const auto& line : curve.end_lines[end])
    if (std::abs(line_offset(line, local)) <= gate) return true;
  return false;
}

}  // namespace

const char* to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::Curve: return "curve";
    case PatchKind::Point: return "point";
    case PatchKind::Segment: return "segment";
  }
  return "curve";
}

std::vector<Point2> SurfacePatch::plane_points() const {
  switch (kind) {
    case PatchKind::Curve: {
      std::vector<Point2> out;
      out.reserve(samples.size());
      for (Point2 s : samples) out.push_back(chart_to_plane(s, chart));
      return out;
    }
    case PatchKind::Point: return {point};
    case PatchKind::Segment: return {endpoints[0], endpoints[1]};
  }
  return {};
}

double SurfacePatch::distance(Point2 x) const {
  switch (kind) {
    case PatchKind::Point: return radon_edges::distance(point, x);
    case PatchKind::Segment: return distance_to_segment(x, endpoints[0], endpoints[1]);
    case PatchKind::Curve: return polyline_distance(plane_points(), x);
  }
  return std::numeric_limits<double>::infinity();
}

double estimate_branch_noise(const SingularBranch& branch) {
  const auto& s = branch.samples;
  if (s.size() < 4) return 0.0;
  std::vector<double> d3;
  for (std::size_t k = 0; k + 3 < s.size(); ++k) d3.push_back(s[k + 3].q - 3 * s[k + 2].q + 3 * s[k + 1].q - s[k].q);
  const double m = median(d3);
  std::vector<double> dev;
  for (double d : d3) dev.push_back(std::abs(d - m));
  const double sigma = 1.4826 * median(dev) / std::sqrt(20.0);
  return 3.0 * sigma;
}

std::vector<std::pair<std::size_t, std::size_t>> split_at_inflections(const SingularBranch& branch,
                                                                       std::size_t persistence) {
  const std::size_t n = branch.samples.size();
  if (n < 5) return {{0, n}};
  const std::size_t s = std::max<std::size_t>(1, (n - 1) / 8);
  const double margin = 2.0 * estimate_branch_noise(branch);
  std::vector<int> sign(n, 0);
  for (std::size_t k = s; k + s < n; ++k) {
    const auto& a = branch.samples[k - s];
    const auto& m = branch.samples[k];
    const auto& b = branch.samples[k + s];
    const double t = (m.beta - a.beta) / (b.beta - a.beta);
    const double dev = a.q + t * (b.q - a.q) - m.q;
    sign[k] = dev > margin ? 1 : (dev < -margin ? -1 : 0);
  }
  // Runs of a constant nonzero sign that last at least `persistence` samples.
  struct Run {
    int sign;
    std::size_t first, last;
  };
  std::vector<Run> runs;
  for (std::size_t k = 0; k < n; ++k) {
    if (sign[k] == 0) continue;
    if (!runs.empty() && runs.back().sign == sign[k] && k - runs.back().last <= persistence) {
      runs.back().last = k;
    } else {
      runs.push_back({sign[k], k, k});
    }
  }
  std::vector<Run> solid;
  for (const auto& r : runs) {
    if (r.last - r.first + 1 < persistence) continue;
    if (!solid.empty() && solid.back().sign == r.sign)
      solid.back().last = r.last;
    else
      solid.push_back(r);
  }
  std::vector<std::pair<std::size_t, std::size_t>> pieces;
  std::size_t start = 0;
  for (std::size_t i = 1; i < solid.size(); ++i) {
    const std::size_t cut = (solid[i - 1].last + solid[i].first + 1) / 2;
    pieces.emplace_back(start, cut);
    start = cut;
  }
  pieces.emplace_back(start, n);
  return pieces;
}

std::vector<SurfacePatch> reconstruct_gamma(const std::vector<SingularBranch>& input,
                                            const ReconstructConfig& config) {
  std::vector<SingularBranch> branches = input;
  for (auto& b : branches)
    std::stable_sort(b.samples.begin(), b.samples.end(),
                     [](const BranchSample& x, const BranchSample& y) { return x.beta < y.beta; });
  double dp = 0.0;
  for (const auto& b : branches) dp = std::max(dp, b.p_step);

  std::vector<SurfacePatch> raw = affine_points(branches, config.merge_gate * dp);
  for (std::size_t id = 0; id < branches.size(); ++id) {
    const auto& b = branches[id];
    if (b.samples.size() < 3 || point_like(b)) continue;
    const double noise = estimate_branch_noise(b);
    for (const auto& [first, last] : split_at_inflections(b, config.inflection_persistence)) {
      if (last - first < 3) continue;
      for (auto& p : transform_piece(b, first, last, id, noise))
        if (p.kind == PatchKind::Curve || b.cls != SingularityClass::SmoothFold) raw.push_back(std::move(p));
    }
  }

  auto support_of = [&](const SurfacePatch& p) {
    std::size_t n = 0;
    for (auto id : p.provenance) n += branches[id].samples.size();
    return n;
  };

  // Chart merge: nearby duplicates collapse onto the better supported one.
  std::vector<SurfacePatch> points, curves;
  for (auto& p : raw) (p.kind == PatchKind::Point ? points : curves).push_back(std::move(p));
  std::stable_sort(points.begin(), points.end(),
                   [&](const SurfacePatch& a, const SurfacePatch& b) { return support_of(a) > support_of(b); });
  std::vector<SurfacePatch> kept_points;
  for (auto& p : points) {
    auto near = std::find_if(kept_points.begin(), kept_points.end(), [&](const SurfacePatch& k) {
      return distance(k.point, p.point) <= config.merge_gate * dp;
    });
    if (near == kept_points.end())
      kept_points.push_back(std::move(p));
    else
      near->provenance.insert(near->provenance.end(), p.provenance.begin(), p.provenance.end());
  }
  std::stable_sort(curves.begin(), curves.end(), [](const SurfacePatch& a, const SurfacePatch& b) {
    return a.samples.size() > b.samples.size();
  });
  std::vector<SurfacePatch> kept_curves;
  for (auto& c : curves) {
    const auto pts = c.plane_points();
    auto dup = std::find_if(kept_curves.begin(), kept_curves.end(), [&](const SurfacePatch& k) {
      return polyline_hausdorff(k.plane_points(), pts) <= config.merge_gate * dp;
    });
    if (dup == kept_curves.end())
      kept_curves.push_back(std::move(c));
    else
      dup->provenance.insert(dup->provenance.end(), c.provenance.begin(), c.provenance.end());
  }

  // Segments between point features that close both ends of one curve patch.
  std::vector<SurfacePatch> segments;
  std::set<std::pair<std::size_t, std::size_t>> joined;
  const double gate = config.join_gate * dp;
  for (std::size_t i = 0; i < kept_points.size(); ++i)
    for (std::size_t j = i + 1; j < kept_points.size(); ++j) {
      if (distance(kept_points[i].point, kept_points[j].point) <= gate) continue;
      for (const auto& c : kept_curves) {
        const Point2 a = kept_points[i].point, b = kept_points[j].point;
        const bool forward = closes_end(c, 0, a, gate) && closes_end(c, 1, b, gate);
        const bool backward = closes_end(c, 0, b, gate) && closes_end(c, 1, a, gate);
        if (!(forward || backward) || !joined.insert({i, j}).second) continue;
        SurfacePatch s;
        s.kind = PatchKind::Segment;
        s.chart = c.chart;
        s.endpoints = {a, b};
        s.provenance = kept_points[i].provenance;
        s.provenance.insert(s.provenance.end(), kept_points[j].provenance.begin(), kept_points[j].provenance.end());
        segments.push_back(std::move(s));
      }
    }

  std::vector<SurfacePatch> out;
  out.reserve(kept_curves.size() + kept_points.size() + segments.size());
  for (auto& c : kept_curves) out.push_back(std::move(c));
  for (auto& p : kept_points) out.push_back(std::move(p));
  for (auto& s : segments) out.push_back(std::move(s));
  return out;
}

ScoreReport score_reconstruction(const std::vector<SurfacePatch>& patches, const Phantom& truth, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidParameter("score tolerance must be positive");
  ScoreReport report;
  report.tolerance = tolerance;

  std::vector<std::vector<Point2>> geometry;
  for (const auto& p : patches) {
    if (p.kind != PatchKind::Segment) {
      geometry.push_back(p.plane_points());
      continue;
    }
    geometry.push_back({p.endpoints[0], p.endpoints[1]});
  }
  auto patch_distance = [&](Point2 x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : geometry) best = std::min(best, polyline_distance(g, x));
    return best;
  };
  auto truth_distance = [&](Point2 x) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : truth.pieces()) best = std::min(best, piece.distance(x));
    return best;
  };

  for (const auto& p : patches) {
    std::vector<Point2> probe = p.plane_points();
    if (p.kind == PatchKind::Segment) {
      probe.clear();
      for (int i = 0; i <= 200; ++i) probe.push_back(p.endpoints[0] + (i / 200.0) * (p.endpoints[1] - p.endpoints[0]));
    } else if (p.kind == PatchKind::Curve) {
      // Densify between samples so the polyline itself is measured.
      std::vector<Point2> dense;
      for (std::size_t i = 0; i + 1 < probe.size(); ++i)
        for (int k = 0; k < 4; ++k) dense.push_back(probe[i] + (k / 4.0) * (probe[i + 1] - probe[i]));
      dense.push_back(probe.back());
      probe = std::move(dense);
    }
    for (Point2 x : probe) report.hausdorff = std::max(report.hausdorff, truth_distance(x));
  }

  double covered_length = 0.0, total_length = 0.0;
  report.hausdorff_symmetric = report.hausdorff;
  for (const auto& piece : truth.pieces()) {
    const auto pts = piece.sample(2000);
    std::size_t covered = 0;
    for (Point2 x : pts) {
      const double d = patch_distance(x);
      report.hausdorff_symmetric = std::max(report.hausdorff_symmetric, d);
      if (d <= tolerance) ++covered;
    }
    const double frac = static_cast<double>(covered) / static_cast<double>(pts.size());
    report.piece_coverage.push_back(frac);
    const double len = piece.length();
    covered_length += frac * len;
    total_length += len;
  }
  report.coverage = total_length > 0.0 ? covered_length / total_length : 0.0;
  if (patches.empty()) report.hausdorff_symmetric = std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace radon_edges
