#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "radon_edges/io.hpp"
#include "radon_edges/pipeline.hpp"

namespace fs = std::filesystem;
using namespace radon_edges;
using nlohmann::json;

namespace {

struct Result {
  int code = -1;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("radon_edges_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  Result run(const std::string& args) const {
    const std::string err = path("stderr.txt");
    const std::string cmd = std::string(RADON_EDGES_CLI) + " " + args + " >" + path("stdout.txt") + " 2>" + err;
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = read_text_file(err);
    return r;
  }

  fs::path dir_;
};

std::size_t line_count(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

std::size_t chart_a_count(const std::string& branches_json) {
  std::size_t n = 0;
  for (const auto& b : json::parse(branches_json))
    if (b.at("chart") == "A") ++n;
  return n;
}

}  // namespace

TEST_F(Cli, SinogramWritesEveryRow) {
  const auto r = run("sinogram --phantom disk:a=1 --ntheta 180 --np 512 --out " + path("d.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(read_text_file(path("d.csv"))), 180u * 512u + 1u);
  const auto side = json::parse(read_text_file(path("d.json")));
  EXPECT_EQ(side.at("theta_grid").size(), 180u);
  EXPECT_TRUE(side.at("noise_meta").is_null());
}

TEST_F(Cli, BadPhantomSpecsExitNonzero) {
  auto r = run("sinogram --phantom disk:a=0 --out " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("a"), std::string::npos);
  r = run("sinogram --phantom disk:r=1 --out " + path("x.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'r'"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.csv")));
  EXPECT_NE(run("sinogram").code, 0);
  EXPECT_NE(run("").code, 0);
}

TEST_F(Cli, NoiseIsDeterministicPerSeed) {
  ASSERT_EQ(run("sinogram --phantom parabola --ntheta 20 --np 64 --noise uniform:1e-3 --seed 4 --out " + path("a.csv"))
                .code,
            0);
  ASSERT_EQ(run("sinogram --phantom parabola --ntheta 20 --np 64 --noise uniform:1e-3 --seed 4 --out " + path("b.csv"))
                .code,
            0);
  ASSERT_EQ(run("sinogram --phantom parabola --ntheta 20 --np 64 --noise uniform:1e-3 --seed 5 --out " + path("c.csv"))
                .code,
            0);
  EXPECT_EQ(read_text_file(path("a.csv")), read_text_file(path("b.csv")));
  EXPECT_NE(read_text_file(path("a.csv")), read_text_file(path("c.csv")));
}

TEST_F(Cli, DetectMatchesLibraryOutput) {
  ASSERT_EQ(run("sinogram --phantom disk:a=1 --out " + path("d.csv")).code, 0);
  const auto r = run("detect --sinogram " + path("d.csv") + " --out " + path("b.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = read_text_file(path("b.json"));
  EXPECT_EQ(chart_a_count(text), 2u);
  EXPECT_EQ(text, branches_to_json(detect_branches(make_sinogram(make_disk(1.0), 180, 512))) + "\n");
  const auto meta = json::parse(read_text_file(path("b.meta.json")));
  EXPECT_EQ(meta.at("config").at("threshold"), 6.0);
}

TEST_F(Cli, DetectEchoesFlags) {
  ASSERT_EQ(run("sinogram --phantom disk:a=1 --ntheta 60 --np 128 --out " + path("d.csv")).code, 0);
  ASSERT_EQ(run("detect --sinogram " + path("d.csv") + " --threshold 8 --link-gate 2.5 --out " + path("b.json")).code,
            0);
  const auto meta = json::parse(read_text_file(path("b.meta.json")));
  EXPECT_EQ(meta.at("config").at("threshold"), 8.0);
  EXPECT_EQ(meta.at("config").at("link_gate"), 2.5);
}

TEST_F(Cli, ZeroSinogramHasNoBranches) {
  Sinogram s = make_sinogram(make_disk(1.0), 30, 128);
  std::fill(s.values.begin(), s.values.end(), 0.0);
  std::ostringstream csv;
  write_sinogram_csv(csv, s);
  write_text_file(path("z.csv"), csv.str());
  ASSERT_EQ(run("detect --sinogram " + path("z.csv") + " --out " + path("b.json")).code, 0);
  EXPECT_EQ(json::parse(read_text_file(path("b.json"))).size(), 0u);
}

TEST_F(Cli, TruncatedSinogramReportsLine) {
  write_text_file(path("t.csv"), "theta,p,value\n0,-1,0\n0,-0.5,0.5\n0,0,1\n0,0.5\n");
  const auto r = run("detect --sinogram " + path("t.csv") + " --out " + path("b.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 5"), std::string::npos) << r.err;
}

TEST_F(Cli, MissingInputFileFails) {
  EXPECT_EQ(run("detect --sinogram " + path("nope.csv") + " --out " + path("b.json")).code, 2);
}

TEST_F(Cli, ReconstructParabola) {
  ASSERT_EQ(run("sinogram --phantom parabola --out " + path("p.csv")).code, 0);
  ASSERT_EQ(run("detect --sinogram " + path("p.csv") + " --out " + path("b.json")).code, 0);
  const auto r = run("reconstruct --branches " + path("b.json") + " --truth parabola --out " + path("r.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto out = json::parse(read_text_file(path("r.json")));
  std::size_t points = 0, segments = 0;
  for (const auto& p : out.at("patches")) {
    if (p.at("kind") == "point") ++points;
    if (p.at("kind") == "segment") ++segments;
  }
  EXPECT_EQ(points, 2u);
  EXPECT_EQ(segments, 1u);
  EXPECT_GE(out.at("score").at("coverage").get<double>(), 0.9);
}

TEST_F(Cli, ReconstructEmptyBranches) {
  write_text_file(path("b.json"), "[]\n");
  ASSERT_EQ(run("reconstruct --branches " + path("b.json") + " --out " + path("r.json")).code, 0);
  EXPECT_EQ(json::parse(read_text_file(path("r.json"))).at("patches").size(), 0u);
}

TEST_F(Cli, ExamplesExitCodes) {
  auto r = run("examples --ntheta 90 --np 256 --out " + path("e.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("PASS disk"), std::string::npos);
  EXPECT_EQ(json::parse(read_text_file(path("e.json"))).at("examples").size(), 3u);
  r = run("examples --ntheta 90 --np 256 --exponent-tol 0 --out " + path("e.json"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
}
