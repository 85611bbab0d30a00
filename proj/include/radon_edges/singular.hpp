#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "radon_edges/chart.hpp"
#include "radon_edges/radon.hpp"

namespace radon_edges {

// Knobs of the singular-support detector, linker and flatness test.
struct DetectionConfig {
  double threshold = 6.0;            // detection level, in robust noise-scale units
  std::size_t fit_window = 9;        // one-sided samples used by the exponent fit
  std::size_t model_window = 24;     // one-sided samples used by the local model fit
  double exponent_tolerance = 0.15;  // classification band around 1/2 and 1
  double link_gate = 3.0;            // p-grid steps, scaled by (1 + beta^2)
  std::size_t min_branch_length = 8;
  double affine_gate = 4.0;          // p-grid steps, scaled by sqrt(1 + beta^2)
  std::size_t max_link_gap = 4;      // columns a branch may skip
  double chart_beta_max = 2.0;       // |beta| range handled by each chart
};

enum class SingularityClass { SmoothFold, Corner, Unclassified };

const char* to_string(SingularityClass c);
SingularityClass singularity_class_from_string(const char* name);

// R(p) ~ c0 + c1*z + c2*z^2 + amplitude * (side*z)_+^exponent, z = p - location.
struct LocalSingularModel {
  double location = 0.0;
  double exponent = 0.0;
  double exponent_ci = 0.0;  // half-width of the slope's ~95% interval
  int side = 1;              // +1: nonsmooth part on p > location
  double amplitude = 0.0;
  std::array<double, 3> smooth{};
  double residual = 0.0;  // rms misfit of the local model
};

struct Detection {
  double p = 0.0;
  LocalSingularModel model;
  SingularityClass cls = SingularityClass::Unclassified;
  // Two singularities closer than the fit window collapsed into one.
  bool merged = false;

  // Unresolved detections may be shared by several branches when linking.
  bool shareable() const { return merged || cls == SingularityClass::Unclassified; }
};

SingularityClass classify_exponent(double exponent, double tolerance);

// Fits the local model around sample `index` of a uniformly sampled profile.
// `noise_scale` is the per-sample noise standard deviation (0 if unknown).
LocalSingularModel fit_local_model(std::span<const double> values, double p0, double dp, std::size_t index,
                                   const DetectionConfig& config, double noise_scale = 0.0);

// Singularities of a single uniformly sampled profile.
std::vector<Detection> detect_profile(std::span<const double> values, double p0, double dp,
                                      const DetectionConfig& config = {});

std::vector<Detection> detect_column(const Sinogram& sinogram, std::size_t theta_index,
                                     const DetectionConfig& config = {});

std::vector<std::vector<Detection>> detect_all_columns(const Sinogram& sinogram,
                                                       const DetectionConfig& config = {});

struct BranchSample {
  double beta = 0.0;
  double q = 0.0;
  double exponent = 0.0;
  SingularityClass cls = SingularityClass::Unclassified;
  bool shared = false;
};

// A connected piece of the singular support q = h(beta) in one chart.
struct SingularBranch {
  Chart chart = Chart::A;
  std::vector<BranchSample> samples;  // beta strictly increasing
  double p_step = 0.0;                // p-grid step of the source sinogram
  int side = 1;                       // +1: nonsmooth half towards larger q
  double exponent = 0.0;
  double exponent_ci = 0.0;
  SingularityClass cls = SingularityClass::Unclassified;
  double strength = 0.0;  // median |amplitude|
  bool affine = false;

  std::vector<double> betas() const;
  std::vector<double> qs() const;
};

// Columns handled by a chart, sorted by increasing beta.
std::vector<std::size_t> chart_columns(const Sinogram& sinogram, Chart chart, double beta_max);

std::vector<SingularBranch> link_branches(const std::vector<std::vector<Detection>>& per_column,
                                          const Sinogram& sinogram, Chart chart,
                                          const DetectionConfig& config = {});

// Second differences of q at stride s = max(1, (n-1)/4), measured as twice
// the deviation of q_k from the chord through q_{k-s}, q_{k+s}; one value per
// interior sample k in [s, n-1-s].
std::vector<double> branch_second_difference(const SingularBranch& branch);

bool is_affine(const SingularBranch& branch, const DetectionConfig& config = {});

// Detection, linking and flatness flags for both charts.
std::vector<SingularBranch> detect_branches(const Sinogram& sinogram, const DetectionConfig& config = {});

}  // namespace radon_edges
