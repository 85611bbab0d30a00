#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radon_edges/phantom.hpp"
#include "radon_edges/radon.hpp"
#include "radon_edges/reconstruct.hpp"
#include "radon_edges/singular.hpp"

namespace radon_edges {

// `disk:a=1`, `annulus:b=1,a=2`, `parabola`, `polygon:(x,y);(x,y);...`.
// Errors name the offending key.
Phantom parse_phantom_spec(std::string_view spec);

// `uniform:1e-3` or `gaussian:1e-3`.
NoiseSpec parse_noise_spec(std::string_view spec, std::uint64_t seed);

// `lo:hi`.
PRange parse_p_range(std::string_view spec);

struct PipelineConfig {
  std::size_t n_theta = 180;
  std::size_t n_p = 512;
  std::optional<PRange> p_range;
  std::optional<NoiseSpec> noise;
  DetectionConfig detection;
  ReconstructConfig reconstruct;
};

struct PipelineResult {
  Sinogram sinogram;
  std::vector<SingularBranch> branches;
  std::vector<SurfacePatch> patches;
  ScoreReport score;
};

PipelineResult run_pipeline(const Phantom& phantom, const PipelineConfig& config = {});

struct ExampleCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double limit = 0.0;
};

struct ExampleReport {
  std::string name;
  bool passed = false;
  std::vector<ExampleCheck> checks;
  // Robust branch exponents, keyed by what the branch traces.
  std::vector<std::pair<std::string, double>> exponents;
  double seconds = 0.0;
};

// Disk, annulus and parabola region, end to end, against fixed thresholds.
std::vector<ExampleReport> run_examples(const PipelineConfig& config = {});

std::string examples_to_json(const std::vector<ExampleReport>& reports);

}  // namespace radon_edges
