#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "radon_edges/errors.hpp"
#include "radon_edges/io.hpp"
#include "radon_edges/pipeline.hpp"

namespace re = radon_edges;
using nlohmann::json;

namespace {

struct SinogramOptions {
  std::string phantom;
  std::size_t n_theta = 180;
  std::size_t n_p = 512;
  std::string prange;
  std::string noise;
  std::uint64_t seed = 0;
  std::string out = "sinogram.csv";
};

struct DetectOptions {
  std::string sinogram;
  std::string out = "branches.json";
};

struct ReconstructOptions {
  std::string branches;
  std::string truth;
  double tolerance = 0.0;
  std::string out = "reconstruction.json";
};

struct ExamplesOptions {
  std::size_t n_theta = 180;
  std::size_t n_p = 512;
  std::string noise;
  std::uint64_t seed = 0;
  std::string out;
};

std::string sidecar_path(const std::string& path, const char* suffix) {
  std::filesystem::path p(path);
  p.replace_extension(suffix);
  return p.string();
}

void add_detection_flags(CLI::App* cmd, re::DetectionConfig& c) {
  cmd->add_option("--threshold", c.threshold, "Detection level in robust noise units")->capture_default_str();
  cmd->add_option("--fit-window", c.fit_window, "One-sided exponent fit window (samples)")->capture_default_str();
  cmd->add_option("--model-window", c.model_window, "One-sided local model window (samples)")->capture_default_str();
  cmd->add_option("--exponent-tol", c.exponent_tolerance, "Classification band around 1/2 and 1")
      ->capture_default_str();
  cmd->add_option("--link-gate", c.link_gate, "Branch continuity gate (p steps)")->capture_default_str();
  cmd->add_option("--min-branch-length", c.min_branch_length, "Shortest kept branch")->capture_default_str();
  cmd->add_option("--affine-gate", c.affine_gate, "Flatness gate (p steps)")->capture_default_str();
  cmd->add_option("--max-link-gap", c.max_link_gap, "Columns a branch may skip")->capture_default_str();
  cmd->add_option("--beta-max", c.chart_beta_max, "Slope range handled by each chart")->capture_default_str();
}

void add_reconstruct_flags(CLI::App* cmd, re::ReconstructConfig& c) {
  cmd->add_option("--join-gate", c.join_gate, "Segment join gate (p steps)")->capture_default_str();
  cmd->add_option("--merge-gate", c.merge_gate, "Duplicate patch gate (p steps)")->capture_default_str();
  cmd->add_option("--inflection-persistence", c.inflection_persistence, "Samples a curvature sign must persist")
      ->capture_default_str();
}

int cmd_sinogram(const SinogramOptions& o) {
  const auto phantom = re::parse_phantom_spec(o.phantom);
  std::optional<re::PRange> range;
  if (!o.prange.empty()) range = re::parse_p_range(o.prange);
  std::optional<re::NoiseSpec> noise;
  if (!o.noise.empty()) noise = re::parse_noise_spec(o.noise, o.seed);
  if (o.n_theta == 0 || o.n_p == 0) throw re::InvalidParameter("grid sizes must be positive");
  const auto s = re::make_sinogram(phantom, o.n_theta, o.n_p, range, noise);
  std::ostringstream csv;
  re::write_sinogram_csv(csv, s);
  re::write_text_file(o.out, csv.str());
  re::write_text_file(sidecar_path(o.out, ".json"), re::sinogram_sidecar_json(s, &phantom) + "\n");
  if (s.coverage_warning) std::cerr << "warning: p range does not cover the phantom's support\n";
  return 0;
}

re::Sinogram load_sinogram(const std::string& path) {
  std::istringstream in(re::read_text_file(path));
  auto s = re::read_sinogram_csv(in);
  const auto side = sidecar_path(path, ".json");
  if (std::filesystem::exists(side) && side != path) re::apply_sinogram_sidecar(s, re::read_text_file(side));
  return s;
}

int cmd_detect(const DetectOptions& o, const re::DetectionConfig& config) {
  const auto s = load_sinogram(o.sinogram);
  const auto branches = re::detect_branches(s, config);
  re::write_text_file(o.out, re::branches_to_json(branches) + "\n");
  const json meta{{"sinogram", o.sinogram},
                  {"config", json::parse(re::detection_config_to_json(config))},
                  {"branch_count", branches.size()}};
  re::write_text_file(sidecar_path(o.out, ".meta.json"), meta.dump(2) + "\n");
  return 0;
}

int cmd_reconstruct(const ReconstructOptions& o, const re::ReconstructConfig& config) {
  const auto branches = re::branches_from_json(re::read_text_file(o.branches));
  const auto patches = re::reconstruct_gamma(branches, config);
  std::optional<re::ScoreReport> score;
  if (!o.truth.empty()) {
    const auto truth = re::parse_phantom_spec(o.truth);
    double tol = o.tolerance;
    if (!(tol > 0.0)) {
      double dp = 0.0;
      for (const auto& b : branches) dp = std::max(dp, b.p_step);
      tol = dp > 0.0 ? config.join_gate * dp : 1e-2 * truth.support_radius();
    }
    score = re::score_reconstruction(patches, truth, tol);
  }
  re::write_text_file(o.out, re::reconstruction_to_json(patches, score, config) + "\n");
  return 0;
}

int cmd_examples(const ExamplesOptions& o, const re::PipelineConfig& base) {
  re::PipelineConfig config = base;
  config.n_theta = o.n_theta;
  config.n_p = o.n_p;
  if (!o.noise.empty()) config.noise = re::parse_noise_spec(o.noise, o.seed);
  const auto reports = re::run_examples(config);
  const auto text = re::examples_to_json(reports) + "\n";
  if (o.out.empty())
    std::cout << text;
  else
    re::write_text_file(o.out, text);
  bool ok = true;
  for (const auto& r : reports) {
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary recovery from Radon transform singularities"};
  app.require_subcommand(1);

  SinogramOptions so;
  auto* sino = app.add_subcommand("sinogram", "Sample the Radon transform of a phantom");
  sino->add_option("--phantom", so.phantom, "disk:a=1 | annulus:b=1,a=2 | parabola | polygon:(x,y);...")->required();
  sino->add_option("--ntheta", so.n_theta, "Angles in [0, pi)")->capture_default_str();
  sino->add_option("--np", so.n_p, "Offsets")->capture_default_str();
  sino->add_option("--prange", so.prange, "Offset range lo:hi (default 1.2x support radius)");
  sino->add_option("--noise", so.noise, "uniform:LEVEL or gaussian:LEVEL");
  sino->add_option("--seed", so.seed, "Noise seed")->capture_default_str();
  sino->add_option("--out", so.out, "Output CSV; a .json sidecar is written next to it")->capture_default_str();

  DetectOptions dopt;
  re::DetectionConfig dconf;
  auto* detect = app.add_subcommand("detect", "Detect and link singular branches");
  detect->add_option("--sinogram", dopt.sinogram, "Sinogram CSV")->required();
  detect->add_option("--out", dopt.out, "Branches JSON")->capture_default_str();
  add_detection_flags(detect, dconf);

  ReconstructOptions ropt;
  re::ReconstructConfig rconf;
  auto* recon = app.add_subcommand("reconstruct", "Recover boundary patches from branches");
  recon->add_option("--branches", ropt.branches, "Branches JSON")->required();
  recon->add_option("--truth", ropt.truth, "Phantom spec to score against");
  recon->add_option("--tolerance", ropt.tolerance, "Coverage tolerance (default join gate x p step)");
  recon->add_option("--out", ropt.out, "Reconstruction JSON")->capture_default_str();
  add_reconstruct_flags(recon, rconf);

  ExamplesOptions eopt;
  re::PipelineConfig econf;
  auto* examples = app.add_subcommand("examples", "Run the disk, annulus and parabola examples");
  examples->add_option("--ntheta", eopt.n_theta)->capture_default_str();
  examples->add_option("--np", eopt.n_p)->capture_default_str();
  examples->add_option("--noise", eopt.noise, "uniform:LEVEL or gaussian:LEVEL");
  examples->add_option("--seed", eopt.seed)->capture_default_str();
  examples->add_option("--out", eopt.out, "Report JSON (default stdout)");
  add_detection_flags(examples, econf.detection);
  add_reconstruct_flags(examples, econf.reconstruct);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sino) return cmd_sinogram(so);
    if (*detect) return cmd_detect(dopt, dconf);
    if (*recon) return cmd_reconstruct(ropt, rconf);
    if (*examples) return cmd_examples(eopt, econf);
  } catch (const re::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
