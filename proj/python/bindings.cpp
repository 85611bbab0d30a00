#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "radon_edges/errors.hpp"
#include "radon_edges/io.hpp"
#include "radon_edges/legendre.hpp"
#include "radon_edges/pipeline.hpp"

namespace py = pybind11;
namespace re = radon_edges;

namespace {

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> sinogram_values(const re::Sinogram& s) {
  py::array_t<double> out({s.n_theta(), s.n_p()});
  std::copy(s.values.begin(), s.values.end(), out.mutable_data());
  return out;
}

re::PipelineConfig pipeline_config(std::size_t n_theta, std::size_t n_p, std::optional<std::string> noise,
                                   std::uint64_t seed, double exponent_tolerance) {
  re::PipelineConfig c;
  c.n_theta = n_theta;
  c.n_p = n_p;
  if (noise) c.noise = re::parse_noise_spec(*noise, seed);
  c.detection.exponent_tolerance = exponent_tolerance;
  return c;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Radon transform singularities and boundary recovery";

  auto error = py::register_exception<re::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<re::InvalidParameter>(m, "InvalidParameter", error.ptr());
  py::register_exception<re::ChartExcluded>(m, "ChartExcluded", error.ptr());
  py::register_exception<re::NotImplemented>(m, "NotImplemented", error.ptr());
  py::register_exception<re::InsufficientData>(m, "InsufficientData", error.ptr());
  py::register_exception<re::NonConvexBranch>(m, "NonConvexBranch", error.ptr());
  py::register_exception<re::ParseError>(m, "ParseError", error.ptr());

  py::class_<re::Phantom>(m, "Phantom")
      .def_property_readonly("shape", [](const re::Phantom& p) { return re::to_string(p.shape()); })
      .def_property_readonly("parameters", &re::Phantom::parameters)
      .def_property_readonly("support_radius", &re::Phantom::support_radius)
      .def_property_readonly("corners",
                             [](const re::Phantom& p) {
                               std::vector<std::pair<double, double>> out;
                               for (const auto& c : p.corners()) out.emplace_back(c.point.x, c.point.y);
                               return out;
                             })
      .def("area", &re::Phantom::area)
      .def("contains", [](const re::Phantom& p, double x, double y) { return p.contains({x, y}); })
      .def("to_json", [](const re::Phantom& p) { return re::phantom_to_json(p); });

  m.def("make_disk", &re::make_disk, py::arg("a"));
  m.def("make_annulus", &re::make_annulus, py::arg("b"), py::arg("a"));
  m.def("make_parabola_region", &re::make_parabola_region);
  m.def(
      "make_polygon",
      [](const std::vector<std::pair<double, double>>& v) {
        std::vector<re::Point2> pts;
        for (const auto& [x, y] : v) pts.push_back({x, y});
        return re::make_polygon(pts);
      },
      py::arg("vertices"));
  m.def("parse_phantom_spec", [](const std::string& s) { return re::parse_phantom_spec(s); }, py::arg("spec"));
  m.def("phantom_from_json", [](const std::string& s) { return re::phantom_from_json(s); });

  m.def("radon_analytic", &re::radon_analytic, py::arg("phantom"), py::arg("theta"), py::arg("p"));
  m.def("radon_numeric", &re::radon_numeric, py::arg("phantom"), py::arg("theta"), py::arg("p"),
        py::arg("step") = 1e-3);

  py::class_<re::Sinogram>(m, "Sinogram")
      .def_property_readonly("theta", [](const re::Sinogram& s) { return as_array(s.theta_grid); })
      .def_property_readonly("p", [](const re::Sinogram& s) { return as_array(s.p_grid); })
      .def_property_readonly("values", &sinogram_values)
      .def_property_readonly("p_step", &re::Sinogram::p_step)
      .def_readonly("coverage_warning", &re::Sinogram::coverage_warning);

  m.def(
      "make_sinogram",
      [](const re::Phantom& ph, std::size_t n_theta, std::size_t n_p, std::optional<std::pair<double, double>> prange,
         std::optional<std::string> noise, std::uint64_t seed) {
        std::optional<re::PRange> r;
        if (prange) r = re::PRange{prange->first, prange->second};
        std::optional<re::NoiseSpec> n;
        if (noise) n = re::parse_noise_spec(*noise, seed);
        return re::make_sinogram(ph, n_theta, n_p, r, n);
      },
      py::arg("phantom"), py::arg("n_theta") = 180, py::arg("n_p") = 512, py::arg("p_range") = py::none(),
      py::arg("noise") = py::none(), py::arg("seed") = 0);

  py::class_<re::SingularBranch>(m, "SingularBranch")
      .def_property_readonly("chart", [](const re::SingularBranch& b) { return re::to_string(b.chart); })
      .def_property_readonly("beta", [](const re::SingularBranch& b) { return as_array(b.betas()); })
      .def_property_readonly("q", [](const re::SingularBranch& b) { return as_array(b.qs()); })
      .def_readonly("exponent", &re::SingularBranch::exponent)
      .def_readonly("exponent_ci", &re::SingularBranch::exponent_ci)
      .def_readonly("affine", &re::SingularBranch::affine)
      .def_property_readonly("classification", [](const re::SingularBranch& b) { return re::to_string(b.cls); });

  m.def("detect_branches", [](const re::Sinogram& s) { return re::detect_branches(s); }, py::arg("sinogram"));
  m.def("branches_to_json", &re::branches_to_json);
  m.def("branches_from_json", [](const std::string& s) { return re::branches_from_json(s); });

  py::class_<re::SurfacePatch>(m, "SurfacePatch")
      .def_property_readonly("kind", [](const re::SurfacePatch& p) { return re::to_string(p.kind); })
      .def_property_readonly("points",
                             [](const re::SurfacePatch& p) {
                               std::vector<std::pair<double, double>> out;
                               for (auto x : p.plane_points()) out.emplace_back(x.x, x.y);
                               return out;
                             })
      .def_readonly("provenance", &re::SurfacePatch::provenance);

  m.def("reconstruct_gamma", [](const std::vector<re::SingularBranch>& b) { return re::reconstruct_gamma(b); },
        py::arg("branches"));
  m.def(
      "score_reconstruction",
      [](const std::vector<re::SurfacePatch>& patches, const re::Phantom& truth, double tolerance) {
        const auto r = re::score_reconstruction(patches, truth, tolerance);
        py::dict d;
        d["hausdorff"] = r.hausdorff;
        d["hausdorff_symmetric"] = r.hausdorff_symmetric;
        d["coverage"] = r.coverage;
        d["piece_coverage"] = r.piece_coverage;
        d["tolerance"] = r.tolerance;
        return d;
      },
      py::arg("patches"), py::arg("truth"), py::arg("tolerance"));

  m.def(
      "legendre_discrete",
      [](const std::vector<double>& x, const std::vector<double>& y, std::optional<double> noise) {
        re::SampledFunction f{x, y, noise};
        const auto c = re::legendre_discrete(f);
        py::dict d;
        d["orientation"] = c.orientation == re::Curvature::Convex ? "convex" : "concave";
        if (c.point) {
          d["point"] = std::make_pair(c.point->x, c.point->y);
        } else {
          d["slopes"] = as_array(c.function.grid);
          d["values"] = as_array(c.function.values);
        }
        return d;
      },
      py::arg("x"), py::arg("y"), py::arg("noise") = py::none());

  m.def(
      "run_examples_json",
      [](std::size_t n_theta, std::size_t n_p, std::optional<std::string> noise, std::uint64_t seed, double tol) {
        return re::examples_to_json(re::run_examples(pipeline_config(n_theta, n_p, noise, seed, tol)));
      },
      py::arg("n_theta") = 180, py::arg("n_p") = 512, py::arg("noise") = py::none(), py::arg("seed") = 0,
      py::arg("exponent_tolerance") = 0.15);
}
