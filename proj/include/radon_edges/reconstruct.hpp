#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "radon_edges/chart.hpp"
#include "radon_edges/legendre.hpp"
#include "radon_edges/phantom.hpp"
#include "radon_edges/singular.hpp"

namespace radon_edges {

struct ReconstructConfig {
  double join_gate = 3.0;               // p-grid steps
  double merge_gate = 2.0;              // p-grid steps
  std::size_t inflection_persistence = 3;
};

enum class PatchKind { Curve, Point, Segment };

const char* to_string(PatchKind kind);

// A recovered piece of the boundary.
struct SurfacePatch {
  PatchKind kind = PatchKind::Curve;
  Chart chart = Chart::A;
  // Curve: chart-local samples (x', g(x')) with x' strictly increasing.
  std::vector<Point2> samples;
  // Point: plane coordinates. Segment: endpoints()[0..1].
  Point2 point;
  std::array<Point2, 2> endpoints{};
  std::vector<std::size_t> provenance;  // indices of source branches
  Curvature orientation = Curvature::Convex;
  // Curve: candidate terminal supporting lines (beta, q) at the first and last
  // sample, in the patch's chart.
  std::array<std::vector<Inhomogeneous>, 2> end_lines;

  // Curve samples mapped to the plane, the point, or the two endpoints.
  std::vector<Point2> plane_points() const;
  double distance(Point2 x) const;
};

// Robust sup-norm noise estimate of a branch's q-values from third differences.
double estimate_branch_noise(const SingularBranch& branch);

// Index ranges [first, last) of the convex/concave pieces of a branch.
std::vector<std::pair<std::size_t, std::size_t>> split_at_inflections(const SingularBranch& branch,
                                                                       std::size_t persistence);

std::vector<SurfacePatch> reconstruct_gamma(const std::vector<SingularBranch>& branches,
                                            const ReconstructConfig& config = {});

struct ScoreReport {
  double hausdorff = 0.0;            // max distance from recovered patches to the truth
  double hausdorff_symmetric = 0.0;  // also counts uncovered parts of the truth
  double coverage = 0.0;             // length-weighted fraction of the truth within tolerance
  std::vector<double> piece_coverage;
  double tolerance = 0.0;
};

// Dense sampling (>= 1000 points per truth piece); a truth sample is covered
// when some patch lies within `tolerance` of it.
ScoreReport score_reconstruction(const std::vector<SurfacePatch>& patches, const Phantom& truth, double tolerance);

}  // namespace radon_edges
