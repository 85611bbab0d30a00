#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "radon_edges/geometry.hpp"

namespace radon_edges {

// Samples (x_k, y_k) of a function on a strictly increasing grid, with an
// optional sup-norm bound on the sampling error.
struct SampledFunction {
  std::vector<double> grid;
  std::vector<double> values;
  std::optional<double> noise;

  void validate() const;
};

enum class Curvature { Convex, Concave };

struct HullSegment {
  double x_left = 0.0;
  double x_right = 0.0;
};

// Discrete Legendre transform of a locally convex or concave function.
struct Conjugate {
  // grid = slopes beta_k (strictly increasing), values = beta_k*x_k - g(x_k).
  // Empty when the input is affine.
  SampledFunction function;
  // Input abscissae of the supporting hull edge behind each output sample.
  std::vector<HullSegment> support;
  Curvature orientation = Curvature::Convex;
  // Affine input q = a*beta + c collapses to the single point (a, -c).
  std::optional<Point2> point;
  // Output error bound is error_constant * input noise.
  double error_constant = 1.0;
};

// Supporting-line construction: the greatest convex minorant of the samples
// (least concave majorant for concave input) is conjugated exactly. Throws
// NonConvexBranch when the second differences change sign beyond the noise
// level and InsufficientData for fewer than 3 samples.
Conjugate legendre_discrete(const SampledFunction& fn);

// sup |L(L(fn)) - fn| over the common domain, or nullopt when the transform
// degenerates (affine input).
std::optional<double> legendre_involution_check(const SampledFunction& fn);

// max over interior samples of |g''(y_k) * h''(beta_k) - 1|.
double hessian_reciprocity_check(const SampledFunction& fn);

// h(beta) = beta*y - g(y) with g'(y) = beta solved by bisection on [lo, hi];
// g' must be monotone there.
double legendre_pointwise(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                          double beta, double lo, double hi);

}  // namespace radon_edges
