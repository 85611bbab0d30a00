#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "radon_edges/phantom.hpp"

namespace radon_edges {

enum class NoiseModel { Uniform, Gaussian };

// Additive per-sample noise: uniform on [-level, level] or Gaussian with
// standard deviation `level`.
struct NoiseSpec {
  NoiseModel model = NoiseModel::Uniform;
  double level = 0.0;
  std::uint64_t seed = 0;
};

const char* to_string(NoiseModel model);

// Line integrals R(p, theta) of a phantom on a uniform (theta, p) grid, with
// |alpha| = 1 so values are chord lengths.
struct Sinogram {
  std::vector<double> theta_grid;  // strictly increasing, in [0, pi)
  std::vector<double> p_grid;      // strictly increasing, uniform
  std::vector<double> values;      // theta-major, n_theta * n_p
  std::optional<NoiseSpec> noise;
  bool coverage_warning = false;   // p-range does not cover the phantom's support

  std::size_t n_theta() const { return theta_grid.size(); }
  std::size_t n_p() const { return p_grid.size(); }
  double p_step() const;
  double theta_step() const;
  double at(std::size_t theta_index, std::size_t p_index) const {
    return values[theta_index * p_grid.size() + p_index];
  }
  std::vector<double> column(std::size_t theta_index) const;

  // Throws InvalidParameter on non-uniform or non-increasing grids, size
  // mismatch or non-finite values.
  void validate() const;
};

// Exact measure of {line} ∩ D. Disk and annulus use closed forms; polygons
// and the parabola region clip the line against every piece. Throws
// NotImplemented for custom phantoms.
double radon_analytic(const Phantom& phantom, double theta, double p);

// Midpoint quadrature of the indicator along the line, restricted to the
// phantom's bounding box; the cell size is the largest value <= step that
// tiles the clipped line.
double radon_numeric(const Phantom& phantom, double theta, double p, double step);

struct PRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Default offset range: 1.2 times the support radius on each side.
PRange default_p_range(const Phantom& phantom);

Sinogram make_sinogram(const Phantom& phantom, std::size_t n_theta, std::size_t n_p,
                       std::optional<PRange> p_range = std::nullopt,
                       std::optional<NoiseSpec> noise = std::nullopt);

}  // namespace radon_edges
