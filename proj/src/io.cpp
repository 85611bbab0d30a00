#include "radon_edges/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "radon_edges/errors.hpp"

namespace radon_edges {
namespace {

using nlohmann::json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a point [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

PhantomShape shape_from_string(const std::string& s) {
  for (auto shape : {PhantomShape::Disk, PhantomShape::Annulus, PhantomShape::ParabolaRegion, PhantomShape::Polygon,
                     PhantomShape::Custom})
    if (s == to_string(shape)) return shape;
  throw ParseError("unknown phantom shape '" + s + "'");
}

json piece_json(const BoundaryPiece& piece) {
  json j = std::visit(
      Overloaded{
          [](const CircleArc& c) {
            return json{{"kind", "circle-arc"}, {"center", point_json(c.center)}, {"radius", c.radius}, {"upper", c.upper}};
          },
          [](const ParabolaArc& p) {
            return json{{"kind", "parabola-arc"}, {"coefficients", {p.c2, p.c1, p.c0}}, {"x_range", {p.x_lo, p.x_hi}}};
          },
          [](const LineSegment& s) {
            return json{{"kind", "line-segment"}, {"a", point_json(s.a)}, {"b", point_json(s.b)}};
          },
      },
      piece.shape());
  j["region_left"] = piece.region_left();
  return j;
}

BoundaryPiece piece_from(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const bool left = j.at("region_left").get<bool>();
  if (kind == "circle-arc")
    return {CircleArc{point_from(j.at("center")), j.at("radius").get<double>(), j.at("upper").get<bool>()}, left};
  if (kind == "parabola-arc") {
    const auto& c = j.at("coefficients");
    const auto& r = j.at("x_range");
    return {ParabolaArc{c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>(), r.at(0).get<double>(),
                        r.at(1).get<double>()},
            left};
  }
  if (kind == "line-segment") return {LineSegment{point_from(j.at("a")), point_from(j.at("b"))}, left};
  throw ParseError("unknown boundary piece kind '" + kind + "'");
}

json phantom_json(const Phantom& phantom) {
  json pieces = json::array();
  for (const auto& p : phantom.pieces()) pieces.push_back(piece_json(p));
  json corners = json::array();
  for (const auto& c : phantom.corners())
    corners.push_back({{"point", point_json(c.point)}, {"pieces", {c.piece_a, c.piece_b}}});
  return {{"shape", to_string(phantom.shape())},
          {"parameters", phantom.parameters()},
          {"pieces", pieces},
          {"corners", corners}};
}

Phantom phantom_from(const json& j) {
  try {
    std::vector<BoundaryPiece> pieces;
    for (const auto& p : j.at("pieces")) pieces.push_back(piece_from(p));
    auto params = j.value("parameters", std::vector<double>{});
    return Phantom::from_pieces(std::move(pieces), shape_from_string(j.at("shape").get<std::string>()),
                                std::move(params));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid phantom JSON: ") + e.what());
  }
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("invalid number '" + std::string(field) + "'", line);
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string phantom_to_json(const Phantom& phantom) { return phantom_json(phantom).dump(2); }

Phantom phantom_from_json(std::string_view text) { return phantom_from(parse(text)); }

void write_sinogram_csv(std::ostream& out, const Sinogram& s) {
  out << "theta,p,value\n";
  for (std::size_t i = 0; i < s.n_theta(); ++i) {
    const std::string theta = format_double(s.theta_grid[i]);
    for (std::size_t j = 0; j < s.n_p(); ++j)
      out << theta << ',' << format_double(s.p_grid[j]) << ',' << format_double(s.at(i, j)) << '\n';
  }
}

Sinogram read_sinogram_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw ParseError("empty sinogram file", 1);
  if (trim_cr(line) != "theta,p,value") throw ParseError("expected header 'theta,p,value'", 1);

  Sinogram s;
  std::vector<double> thetas, ps;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim_cr(line);
    if (view.empty()) continue;
    const auto f = split_fields(view);
    if (f.size() != 3) throw ParseError("expected 3 fields, found " + std::to_string(f.size()), lineno);
    thetas.push_back(parse_double(f[0], lineno));
    ps.push_back(parse_double(f[1], lineno));
    s.values.push_back(parse_double(f[2], lineno));
  }
  if (s.values.empty()) throw ParseError("sinogram has no data rows", lineno);

  // The p grid is the run of rows sharing the first theta.
  std::size_t n_p = 1;
  while (n_p < thetas.size() && thetas[n_p] == thetas[0]) ++n_p;
  if (thetas.size() % n_p != 0)
    throw ParseError("row count " + std::to_string(thetas.size()) + " is not a multiple of the p grid size", lineno);
  s.p_grid.assign(ps.begin(), ps.begin() + static_cast<std::ptrdiff_t>(n_p));
  for (std::size_t k = 0; k < thetas.size(); ++k) {
    const std::size_t i = k / n_p, j = k % n_p;
    if (j == 0) s.theta_grid.push_back(thetas[k]);
    if (thetas[k] != s.theta_grid[i] || ps[k] != s.p_grid[j])
      throw ParseError("rows are not on a theta-major grid", k + 2);
  }
  try {
    s.validate();
  } catch (const InvalidParameter& e) {
    throw ParseError(e.what(), lineno);
  }
  return s;
}

std::string sinogram_sidecar_json(const Sinogram& s, const Phantom* phantom) {
  json j;
  j["theta_grid"] = s.theta_grid;
  j["p_grid"] = s.p_grid;
  j["coverage_warning"] = s.coverage_warning;
  if (s.noise)
    j["noise_meta"] = {{"model", to_string(s.noise->model)}, {"level", s.noise->level}, {"seed", s.noise->seed}};
  else
    j["noise_meta"] = nullptr;
  j["phantom"] = phantom ? phantom_json(*phantom) : json(nullptr);
  return j.dump(2);
}

std::optional<Phantom> apply_sinogram_sidecar(Sinogram& s, std::string_view text) {
  const json j = parse(text);
  try {
    s.coverage_warning = j.value("coverage_warning", false);
    if (j.contains("noise_meta") && !j["noise_meta"].is_null()) {
      const auto& n = j["noise_meta"];
      NoiseSpec spec;
      const auto model = n.at("model").get<std::string>();
      if (model == to_string(NoiseModel::Uniform))
        spec.model = NoiseModel::Uniform;
      else if (model == to_string(NoiseModel::Gaussian))
        spec.model = NoiseModel::Gaussian;
      else
        throw ParseError("unknown noise model '" + model + "'");
      spec.level = n.at("level").get<double>();
      spec.seed = n.at("seed").get<std::uint64_t>();
      s.noise = spec;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid sinogram sidecar: ") + e.what());
  }
  if (j.contains("phantom") && !j["phantom"].is_null()) return phantom_from(j["phantom"]);
  return std::nullopt;
}

std::string branches_to_json(const std::vector<SingularBranch>& branches) {
  json out = json::array();
  for (const auto& b : branches) {
    json samples = json::array();
    for (const auto& s : b.samples) samples.push_back({s.beta, s.q});
    out.push_back({{"samples", samples},
                   {"exponent", b.exponent},
                   {"exponent_ci", b.exponent_ci},
                   {"class", to_string(b.cls)},
                   {"affine", b.affine},
                   {"chart", to_string(b.chart)},
                   {"p_step", b.p_step},
                   {"side", b.side},
                   {"strength", b.strength}});
  }
  return out.dump(2);
}

std::vector<SingularBranch> branches_from_json(std::string_view text) {
  const json j = parse(text);
  if (!j.is_array()) throw ParseError("branches JSON must be an array");
  std::vector<SingularBranch> out;
  try {
    for (const auto& e : j) {
      SingularBranch b;
      for (const auto& s : e.at("samples")) {
        if (!s.is_array() || s.size() != 2) throw ParseError("branch samples must be [beta, q] pairs");
        BranchSample bs;
        bs.beta = s[0].get<double>();
        bs.q = s[1].get<double>();
        b.samples.push_back(bs);
      }
      b.exponent = e.at("exponent").get<double>();
      b.exponent_ci = e.at("exponent_ci").get<double>();
      b.cls = singularity_class_from_string(e.at("class").get<std::string>().c_str());
      b.affine = e.at("affine").get<bool>();
      b.chart = chart_from_string(e.value("chart", std::string("A")).c_str());
      b.p_step = e.value("p_step", 0.0);
      b.side = e.value("side", 1);
      b.strength = e.value("strength", 0.0);
      for (auto& s : b.samples) {
        s.exponent = b.exponent;
        s.cls = b.cls;
      }
      out.push_back(std::move(b));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid branches JSON: ") + e.what());
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("invalid branches JSON: ") + e.what());
  }
  return out;
}

std::string detection_config_to_json(const DetectionConfig& c) {
  return json{{"threshold", c.threshold},
              {"fit_window", c.fit_window},
              {"model_window", c.model_window},
              {"exponent_tolerance", c.exponent_tolerance},
              {"link_gate", c.link_gate},
              {"min_branch_length", c.min_branch_length},
              {"affine_gate", c.affine_gate},
              {"max_link_gap", c.max_link_gap},
              {"chart_beta_max", c.chart_beta_max}}
      .dump(2);
}

std::string reconstruct_config_to_json(const ReconstructConfig& c) {
  return json{{"join_gate", c.join_gate},
              {"merge_gate", c.merge_gate},
              {"inflection_persistence", c.inflection_persistence}}
      .dump(2);
}

std::string reconstruction_to_json(const std::vector<SurfacePatch>& patches, const std::optional<ScoreReport>& score,
                                   const std::optional<ReconstructConfig>& config) {
  json list = json::array();
  for (const auto& p : patches) {
    json e{{"kind", to_string(p.kind)}, {"provenance", p.provenance}};
    switch (p.kind) {
      case PatchKind::Curve: {
        json samples = json::array();
        for (Point2 x : p.plane_points()) samples.push_back(point_json(x));
        e["samples"] = samples;
        e["chart"] = to_string(p.chart);
        e["orientation"] = p.orientation == Curvature::Convex ? "convex" : "concave";
        break;
      }
      case PatchKind::Point: e["point"] = point_json(p.point); break;
      case PatchKind::Segment: e["endpoints"] = {point_json(p.endpoints[0]), point_json(p.endpoints[1])}; break;
    }
    list.push_back(std::move(e));
  }
  json out{{"patches", list}};
  if (score)
    out["score"] = {{"hausdorff", score->hausdorff},
                    {"hausdorff_symmetric", score->hausdorff_symmetric},
                    {"coverage", score->coverage},
                    {"piece_coverage", score->piece_coverage},
                    {"tolerance", score->tolerance}};
  if (config) out["config"] = json::parse(reconstruct_config_to_json(*config));
  return out.dump(2);
}

void write_sampled_csv(std::ostream& out, const SampledFunction& fn) {
  out << "x,value\n";
  for (std::size_t i = 0; i < fn.grid.size(); ++i) out << format_double(fn.grid[i]) << ',' << format_double(fn.values[i]) << '\n';
}

SampledFunction read_sampled_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || trim_cr(line) != "x,value") throw ParseError("expected header 'x,value'", 1);
  SampledFunction fn;
  while (std::getline(in, line)) {
    ++lineno;
    const auto view = trim_cr(line);
    if (view.empty()) continue;
    const auto f = split_fields(view);
    if (f.size() != 2) throw ParseError("expected 2 fields", lineno);
    fn.grid.push_back(parse_double(f[0], lineno));
    fn.values.push_back(parse_double(f[1], lineno));
  }
  return fn;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace radon_edges
