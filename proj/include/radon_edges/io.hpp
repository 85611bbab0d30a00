#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "radon_edges/legendre.hpp"
#include "radon_edges/phantom.hpp"
#include "radon_edges/radon.hpp"
#include "radon_edges/reconstruct.hpp"
#include "radon_edges/singular.hpp"

namespace radon_edges {

// Doubles are written in shortest round-trip form, so every reader below
// restores the written values bit for bit.
std::string format_double(double v);

std::string phantom_to_json(const Phantom& phantom);
Phantom phantom_from_json(std::string_view text);

// CSV with header `theta,p,value`, theta-major rows.
void write_sinogram_csv(std::ostream& out, const Sinogram& sinogram);
// Throws ParseError naming the offending line.
Sinogram read_sinogram_csv(std::istream& in);

// Grids, noise metadata, coverage flag and (optionally) the phantom.
std::string sinogram_sidecar_json(const Sinogram& sinogram, const Phantom* phantom = nullptr);
// Copies noise metadata and the coverage flag onto `sinogram`; returns the
// embedded phantom when present.
std::optional<Phantom> apply_sinogram_sidecar(Sinogram& sinogram, std::string_view text);

std::string branches_to_json(const std::vector<SingularBranch>& branches);
std::vector<SingularBranch> branches_from_json(std::string_view text);

std::string detection_config_to_json(const DetectionConfig& config);
std::string reconstruct_config_to_json(const ReconstructConfig& config);

std::string reconstruction_to_json(const std::vector<SurfacePatch>& patches,
                                   const std::optional<ScoreReport>& score = std::nullopt,
                                   const std::optional<ReconstructConfig>& config = std::nullopt);

// Fixture CSV `x,value`.
void write_sampled_csv(std::ostream& out, const SampledFunction& fn);
SampledFunction read_sampled_csv(std::istream& in);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace radon_edges
