#include <gtest/gtest.h>

#include <sstream>

#include "radon_edges/errors.hpp"
#include "radon_edges/io.hpp"

using namespace radon_edges;

namespace {

std::size_t parse_line(const std::string& csv) {
  std::istringstream in(csv);
  try {
    read_sinogram_csv(in);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(SinogramCsv, RoundTripIsExact) {
  const auto s = make_sinogram(make_parabola_region(), 12, 64, std::nullopt, NoiseSpec{NoiseModel::Uniform, 1e-3, 3});
  std::ostringstream out;
  write_sinogram_csv(out, s);
  std::istringstream in(out.str());
  const auto back = read_sinogram_csv(in);
  EXPECT_EQ(back.theta_grid, s.theta_grid);
  EXPECT_EQ(back.p_grid, s.p_grid);
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(out.str().substr(0, 14), "theta,p,value\n");
}

TEST(SinogramCsv, ErrorsNameTheLine) {
  EXPECT_EQ(parse_line("x,y,z\n0,0,0\n"), 1u);
  const auto s = make_sinogram(make_disk(1.0), 2, 8);
  std::ostringstream out;
  write_sinogram_csv(out, s);
  std::string text = out.str();
  // Drop the last field of the fifth data row (file line 6).
  std::size_t pos = 0;
  for (int i = 0; i < 6; ++i) pos = text.find('\n', pos) + 1;
  const std::size_t comma = text.rfind(',', pos - 2);
  const std::string broken = text.substr(0, comma) + text.substr(pos - 1);
  EXPECT_EQ(parse_line(broken), 6u);
  std::string bad_number = text;
  bad_number.replace(bad_number.find('\n') + 1, 1, "zz");
  EXPECT_EQ(parse_line(bad_number), 2u);
  const std::string truncated = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  std::istringstream short_in(truncated);
  EXPECT_THROW(read_sinogram_csv(short_in), ParseError);
  EXPECT_EQ(parse_line(""), 1u);
}

TEST(SinogramCsv, RaggedGridIsRejected) {
  std::istringstream in("theta,p,value\n0,0,1\n0,1,1\n0.5,0,1\n");
  EXPECT_THROW(read_sinogram_csv(in), ParseError);
}

TEST(Sidecar, RestoresNoiseAndPhantom) {
  const auto ph = make_annulus(1.0, 2.0);
  auto s = make_sinogram(ph, 8, 32, PRange{-1.0, 1.0}, NoiseSpec{NoiseModel::Gaussian, 1e-2, 99});
  const auto text = sinogram_sidecar_json(s, &ph);
  Sinogram t = s;
  t.noise.reset();
  t.coverage_warning = false;
  const auto back = apply_sinogram_sidecar(t, text);
  ASSERT_TRUE(t.noise);
  EXPECT_EQ(t.noise->model, NoiseModel::Gaussian);
  EXPECT_EQ(t.noise->level, 1e-2);
  EXPECT_EQ(t.noise->seed, 99u);
  EXPECT_TRUE(t.coverage_warning);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->shape(), PhantomShape::Annulus);
  EXPECT_EQ(back->parameters(), ph.parameters());
}

TEST(PhantomJson, RoundTripKeepsGeometry) {
  for (const auto& ph : {make_disk(1.5), make_annulus(0.5, 1.0), make_parabola_region(),
                         make_polygon(std::vector<Point2>{{0, 0}, {2, 0}, {0.5, 1.5}})}) {
    const auto back = phantom_from_json(phantom_to_json(ph));
    EXPECT_EQ(back.shape(), ph.shape());
    EXPECT_EQ(back.pieces().size(), ph.pieces().size());
    EXPECT_EQ(back.corners().size(), ph.corners().size());
    EXPECT_NEAR(back.area(), ph.area(), 1e-12);
    EXPECT_EQ(phantom_to_json(back), phantom_to_json(ph));
  }
}

TEST(PhantomJson, MalformedInputThrows) {
  EXPECT_THROW(phantom_from_json("{"), ParseError);
  EXPECT_THROW(phantom_from_json(R"({"shape":"disk"})"), ParseError);
}

TEST(BranchesJson, RoundTripIsExact) {
  const auto s = make_sinogram(make_parabola_region(), 90, 256);
  const auto bs = detect_branches(s);
  ASSERT_FALSE(bs.empty());
  const auto text = branches_to_json(bs);
  const auto back = branches_from_json(text);
  ASSERT_EQ(back.size(), bs.size());
  for (std::size_t i = 0; i < bs.size(); ++i) {
    EXPECT_EQ(back[i].chart, bs[i].chart);
    EXPECT_EQ(back[i].betas(), bs[i].betas());
    EXPECT_EQ(back[i].qs(), bs[i].qs());
    EXPECT_EQ(back[i].exponent, bs[i].exponent);
    EXPECT_EQ(back[i].cls, bs[i].cls);
    EXPECT_EQ(back[i].affine, bs[i].affine);
    EXPECT_EQ(back[i].p_step, bs[i].p_step);
  }
  EXPECT_EQ(branches_to_json(back), text);
  EXPECT_EQ(branches_to_json({}), "[]");
}

TEST(BranchesJson, MalformedInputThrows) {
  EXPECT_THROW(branches_from_json("{}"), ParseError);
  EXPECT_THROW(branches_from_json(R"([{"samples":[[0]]}])"), ParseError);
}

TEST(ReconstructionJson, ListsPatchesAndScore) {
  SurfacePatch p;
  p.kind = PatchKind::Point;
  p.point = {1.0, 0.0};
  ScoreReport r;
  r.hausdorff = 0.5;
  r.tolerance = 0.01;
  const auto text = reconstruction_to_json({p}, r, ReconstructConfig{});
  EXPECT_NE(text.find("\"point\""), std::string::npos);
  EXPECT_NE(text.find("\"hausdorff\""), std::string::npos);
  EXPECT_NE(text.find("\"join_gate\""), std::string::npos);
}

TEST(SampledCsv, RoundTrip) {
  SampledFunction f{{0.0, 0.5, 1.0}, {1.0, 0.25, 1.0 / 3.0}, std::nullopt};
  std::ostringstream out;
  write_sampled_csv(out, f);
  std::istringstream in(out.str());
  const auto back = read_sampled_csv(in);
  EXPECT_EQ(back.grid, f.grid);
  EXPECT_EQ(back.values, f.values);
}

TEST(TextFile, MissingFileThrows) { EXPECT_THROW(read_text_file("/nonexistent/dir/file.csv"), Error); }
