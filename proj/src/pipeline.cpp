#include "radon_edges/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include <json.hpp>

#include "radon_edges/errors.hpp"

namespace radon_edges {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double number(std::string_view text, std::string_view key) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw InvalidParameter("invalid value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return v;
}

std::map<std::string, double> key_values(std::string_view body, std::string_view shape,
                                         std::initializer_list<const char*> allowed) {
  std::map<std::string, double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    const auto eq = item.find('=');
    const std::string key(trim(item.substr(0, eq)));
    if (eq == std::string_view::npos) throw InvalidParameter("key '" + key + "' has no value");
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
      throw InvalidParameter("unknown key '" + key + "' for " + std::string(shape));
    if (out.count(key)) throw InvalidParameter("duplicate key '" + key + "'");
    out[key] = number(item.substr(eq + 1), key);
  }
  for (const char* a : allowed)
    if (!out.count(a)) throw InvalidParameter("missing key '" + std::string(a) + "' for " + std::string(shape));
  return out;
}

std::vector<Point2> polygon_vertices(std::string_view body) {
  std::vector<Point2> out;
  while (!body.empty()) {
    const auto semi = body.find(';');
    auto item = trim(body.substr(0, semi));
    body = semi == std::string_view::npos ? std::string_view{} : body.substr(semi + 1);
    if (item.empty()) continue;
    if (item.front() != '(' || item.back() != ')')
      throw InvalidParameter("polygon vertex '" + std::string(item) + "' must look like (x,y)");
    item = item.substr(1, item.size() - 2);
    const auto comma = item.find(',');
    if (comma == std::string_view::npos) throw InvalidParameter("polygon vertex needs two coordinates");
    out.push_back({number(item.substr(0, comma), "x"), number(item.substr(comma + 1), "y")});
  }
  return out;
}

double disk_chord(double r, double p) { return std::abs(p) < r ? 2.0 * std::sqrt(r * r - p * p) : 0.0; }

// Case-split annulus profile for inner radius b, outer radius a.
double annulus_profile(double b, double a, double p) {
  const double s = std::abs(p);
  if (s <= b) return 2.0 * (std::sqrt(a * a - s * s) - std::sqrt(b * b - s * s));
  if (s <= a) return 2.0 * std::sqrt(a * a - s * s);
  return 0.0;
}

double formula_error(const Sinogram& s, const std::function<double(double)>& profile) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.n_theta(); ++i)
    for (std::size_t j = 0; j < s.n_p(); ++j) worst = std::max(worst, std::abs(s.at(i, j) - profile(s.p_grid[j])));
  return worst;
}

using Target = std::function<double(double)>;

// Largest offset between a branch and a target curve q(beta), in p units.
double branch_offset(const SingularBranch& b, const Target& target) {
  double worst = 0.0;
  for (const auto& s : b.samples) worst = std::max(worst, std::abs(s.q - target(s.beta)) / std::hypot(1.0, s.beta));
  return worst;
}

double median_offset(const SingularBranch& b, const Target& target) {
  std::vector<double> d;
  for (const auto& s : b.samples) d.push_back(std::abs(s.q - target(s.beta)) / std::hypot(1.0, s.beta));
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
  return d[d.size() / 2];
}

// Branches of `chart` whose median offset from `target` is within `gate`.
std::vector<const SingularBranch*> matching(const std::vector<SingularBranch>& branches, Chart chart,
                                            const Target& target, double gate) {
  std::vector<const SingularBranch*> out;
  for (const auto& b : branches)
    if (b.chart == chart && !b.samples.empty() && median_offset(b, target) <= gate) out.push_back(&b);
  return out;
}

std::size_t count_chart(const std::vector<SingularBranch>& branches, Chart chart) {
  return static_cast<std::size_t>(
      std::count_if(branches.begin(), branches.end(), [&](const SingularBranch& b) { return b.chart == chart; }));
}

void check(ExampleReport& r, std::string name, double measured, double limit, bool at_least = false) {
  const bool ok = at_least ? measured >= limit : measured <= limit;
  r.checks.push_back({std::move(name), ok, measured, limit});
}

void record_exponents(ExampleReport& r, const std::string& label, const std::vector<const SingularBranch*>& found,
                      double expected, double tolerance) {
  double worst = found.empty() ? std::numeric_limits<double>::infinity() : 0.0;
  for (const auto* b : found) {
    r.exponents.emplace_back(label, b->exponent);
    worst = std::max(worst, std::abs(b->exponent - expected));
  }
  check(r, label + " exponent offset from " + (expected == 0.5 ? std::string("1/2") : std::string("1")), worst,
        tolerance);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExampleReport disk_example(const PipelineConfig& config) {
  ExampleReport r;
  r.name = "disk";
  const auto t0 = std::chrono::steady_clock::now();
  const auto phantom = make_disk(1.0);
  const auto clean = make_sinogram(phantom, config.n_theta, config.n_p, config.p_range);
  check(r, "sinogram vs 2*sqrt(a^2-p^2)", formula_error(clean, [](double p) { return disk_chord(1.0, p); }), 1e-12);

  const auto run = run_pipeline(phantom, config);
  const double dp = run.sinogram.p_step();
  const double tol = config.detection.exponent_tolerance;
  check(r, "chart A branch count - 2", std::abs(static_cast<double>(count_chart(run.branches, Chart::A)) - 2.0), 0.0);
  for (int sign : {1, -1}) {
    const Target t = [sign](double b) { return sign * std::hypot(1.0, b); };
    const auto found = matching(run.branches, Chart::A, t, 2.0 * dp);
    const std::string label = sign > 0 ? "q=+sqrt(1+b^2)" : "q=-sqrt(1+b^2)";
    double worst = found.empty() ? std::numeric_limits<double>::infinity() : 0.0;
    for (const auto* b : found) worst = std::max(worst, branch_offset(*b, t));
    check(r, label + " offset / dp", worst / dp, 2.0);
    record_exponents(r, label, found, 0.5, tol);
  }
  check(r, "hausdorff / dp", run.score.hausdorff / dp, 3.0);
  check(r, "coverage", run.score.coverage, 0.9, true);
  r.seconds = seconds_since(t0);
  return r;
}

ExampleReport annulus_example(const PipelineConfig& config) {
  ExampleReport r;
  r.name = "annulus";
  const auto t0 = std::chrono::steady_clock::now();
  const auto phantom = make_annulus(1.0, 2.0);
  const auto clean = make_sinogram(phantom, config.n_theta, config.n_p, config.p_range);
  check(r, "sinogram vs case-split formula", formula_error(clean, [](double p) { return annulus_profile(1.0, 2.0, p); }),
        1e-12);

  const auto run = run_pipeline(phantom, config);
  const double dp = run.sinogram.p_step();
  const double tol = config.detection.exponent_tolerance;
  check(r, "chart A branch count - 4", std::abs(static_cast<double>(count_chart(run.branches, Chart::A)) - 4.0), 0.0);
  for (double radius : {2.0, 1.0})
    for (int sign : {1, -1}) {
      const Target t = [=](double b) { return sign * radius * std::hypot(1.0, b); };
      const auto found = matching(run.branches, Chart::A, t, 2.0 * dp);
      record_exponents(r, std::string("radius ") + (radius == 2.0 ? "2" : "1") + (sign > 0 ? " upper" : " lower"),
                       found, 0.5, tol);
    }
  const auto& pc = run.score.piece_coverage;
  check(r, "coverage |x|=2", 0.5 * (pc.at(0) + pc.at(1)), 0.9, true);
  check(r, "coverage |x|=1", 0.5 * (pc.at(2) + pc.at(3)), 0.9, true);
  check(r, "hausdorff / dp", run.score.hausdorff / dp, 3.0);
  r.seconds = seconds_since(t0);
  return r;
}

ExampleReport parabola_example(const PipelineConfig& config) {
  ExampleReport r;
  r.name = "parabola";
  const auto t0 = std::chrono::steady_clock::now();
  const auto phantom = make_parabola_region();
  const auto run = run_pipeline(phantom, config);
  const double dp = run.sinogram.p_step();
  const double tol = config.detection.exponent_tolerance;

  const auto& arc = phantom.pieces()[0];
  double arc_offset = 0.0;
  std::size_t curves = 0;
  for (const auto& p : run.patches)
    if (p.kind == PatchKind::Curve)
      for (Point2 x : p.plane_points())
        if (std::abs(x.x) <= 1.0) {
          arc_offset = std::max(arc_offset, arc.distance(x));
          ++curves;
        }
  if (curves == 0) arc_offset = std::numeric_limits<double>::infinity();
  check(r, "parabola arc offset / dp", arc_offset / dp, 3.0);
  check(r, "parabola arc coverage", run.score.piece_coverage.at(0), 0.9, true);

  for (double x : {-1.0, 1.0}) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : run.patches)
      if (p.kind == PatchKind::Point) best = std::min(best, distance(p.point, {x, 0.0}));
    check(r, std::string("point feature (") + (x < 0 ? "-1" : "1") + ",0) / dp", best / dp, 2.0);
  }
  double segment = std::numeric_limits<double>::infinity();
  for (const auto& p : run.patches)
    if (p.kind == PatchKind::Segment) {
      const Point2 a = p.endpoints[0], b = p.endpoints[1];
      const double d = std::max(std::min(distance(a, {-1, 0}), distance(b, {-1, 0})),
                                std::min(distance(a, {1, 0}), distance(b, {1, 0})));
      segment = std::min(segment, d);
    }
  check(r, "joining segment endpoint offset / dp", segment / dp, 2.0);

  const Target fold = [](double b) { return 0.25 * b * b + 1.0; };
  record_exponents(r, "parabola q=b^2/4+1", matching(run.branches, Chart::A, fold, 2.0 * dp), 0.5, tol);
  std::vector<const SingularBranch*> lines;
  for (int sign : {1, -1}) {
    const auto found = matching(run.branches, Chart::A, [sign](double b) { return sign * b; }, 2.0 * dp);
    lines.insert(lines.end(), found.begin(), found.end());
  }
  record_exponents(r, "lines q=+-b", lines, 1.0, tol);
  r.seconds = seconds_since(t0);
  return r;
}

}  // namespace

Phantom parse_phantom_spec(std::string_view spec) {
  spec = trim(spec);
  const auto colon = spec.find(':');
  const std::string shape(trim(spec.substr(0, colon)));
  const std::string_view body = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (shape == "disk") {
    const auto kv = key_values(body, shape, {"a"});
    return make_disk(kv.at("a"));
  }
  if (shape == "annulus") {
    const auto kv = key_values(body, shape, {"b", "a"});
    return make_annulus(kv.at("b"), kv.at("a"));
  }
  if (shape == "parabola") {
    if (!trim(body).empty()) key_values(body, shape, {});
    return make_parabola_region();
  }
  if (shape == "polygon") {
    const auto v = polygon_vertices(body);
    return make_polygon(v);
  }
  throw InvalidParameter("unknown phantom '" + shape + "'");
}

NoiseSpec parse_noise_spec(std::string_view spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InvalidParameter("noise spec must look like uniform:1e-3");
  const auto model = trim(spec.substr(0, colon));
  NoiseSpec n;
  if (model == "uniform")
    n.model = NoiseModel::Uniform;
  else if (model == "gaussian")
    n.model = NoiseModel::Gaussian;
  else
    throw InvalidParameter("unknown noise model '" + std::string(model) + "'");
  n.level = number(spec.substr(colon + 1), "noise");
  if (!(n.level >= 0.0)) throw InvalidParameter("noise level must be nonnegative");
  n.seed = seed;
  return n;
}

PRange parse_p_range(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InvalidParameter("p range must look like lo:hi");
  PRange r{number(spec.substr(0, colon), "prange"), number(spec.substr(colon + 1), "prange")};
  if (!(r.hi > r.lo)) throw InvalidParameter("p range must satisfy lo < hi");
  return r;
}

PipelineResult run_pipeline(const Phantom& phantom, const PipelineConfig& config) {
  PipelineResult out;
  out.sinogram = make_sinogram(phantom, config.n_theta, config.n_p, config.p_range, config.noise);
  out.branches = detect_branches(out.sinogram, config.detection);
  out.patches = reconstruct_gamma(out.branches, config.reconstruct);
  out.score = score_reconstruction(out.patches, phantom, config.reconstruct.join_gate * out.sinogram.p_step());
  return out;
}

std::vector<ExampleReport> run_examples(const PipelineConfig& config) {
  std::vector<ExampleReport> out{disk_example(config), annulus_example(config), parabola_example(config)};
  for (auto& r : out)
    r.passed = std::all_of(r.checks.begin(), r.checks.end(), [](const ExampleCheck& c) { return c.passed; });
  return out;
}

std::string examples_to_json(const std::vector<ExampleReport>& reports) {
  using nlohmann::json;
  json list = json::array();
  bool all = true;
  for (const auto& r : reports) {
    json checks = json::array();
    for (const auto& c : r.checks)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"limit", c.limit}});
    json exps = json::array();
    for (const auto& [label, e] : r.exponents) exps.push_back({{"branch", label}, {"exponent", e}});
    list.push_back({{"example", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"checks", checks},
                    {"exponents", exps}});
    all = all && r.passed;
  }
  return json{{"passed", all}, {"examples", list}}.dump(2);
}

}  // namespace radon_edges
