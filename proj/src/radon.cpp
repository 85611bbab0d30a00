#include "radon_edges/radon.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "radon_edges/errors.hpp"
#include "radon_edges/parallel.hpp"

namespace radon_edges {
namespace {

double chord(double r, double p) {
  const double s = r * r - p * p;
  return s > 0.0 ? 2.0 * std::sqrt(s) : 0.0;
}

struct Line {
  Point2 base;
  Point2 dir;
};

Line make_line(double theta, double p) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {{p * c, p * s}, {-s, c}};
}

// Sum of the lengths of the sub-intervals between consecutive boundary
// crossings whose midpoints lie in D.
double clipped_length(const Phantom& phantom, const Line& line) {
  std::vector<double> ts;
  for (const auto& piece : phantom.pieces()) piece.line_intersections(line.base, line.dir, ts);
  if (ts.size() < 2) return 0.0;
  std::sort(ts.begin(), ts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double gap = ts[i + 1] - ts[i];
    if (gap <= 0.0) continue;
    const double mid = 0.5 * (ts[i] + ts[i + 1]);
    if (phantom.contains(line.base + mid * line.dir)) total += gap;
  }
  return total;
}

// Liang-Barsky clip of the line against a box; false when they miss.
bool clip_to_box(const Line& line, const Box& box, double& t0, double& t1) {
  t0 = -std::numeric_limits<double>::infinity();
  t1 = std::numeric_limits<double>::infinity();
  const double base[2] = {line.base.x, line.base.y};
  const double dir[2] = {line.dir.x, line.dir.y};
  const double lo[2] = {box.lo.x, box.lo.y};
  const double hi[2] = {box.hi.x, box.hi.y};
  for (int k = 0; k < 2; ++k) {
    if (dir[k] == 0.0) {
      if (base[k] < lo[k] || base[k] > hi[k]) return false;
      continue;
    }
    double a = (lo[k] - base[k]) / dir[k];
    double b = (hi[k] - base[k]) / dir[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t1 > t0;
}

}  // namespace

const char* to_string(NoiseModel model) {
  return model == NoiseModel::Uniform ? "additive-uniform" : "additive-gaussian";
}

double Sinogram::p_step() const {
  return p_grid.size() < 2 ? 0.0 : (p_grid.back() - p_grid.front()) / static_cast<double>(p_grid.size() - 1);
}

double Sinogram::theta_step() const {
  return theta_grid.size() < 2 ? 0.0
                               : (theta_grid.back() - theta_grid.front()) / static_cast<double>(theta_grid.size() - 1);
}

std::vector<double> Sinogram::column(std::size_t theta_index) const {
  const auto first = values.begin() + static_cast<std::ptrdiff_t>(theta_index * p_grid.size());
  return {first, first + static_cast<std::ptrdiff_t>(p_grid.size())};
}

void Sinogram::validate() const {
  if (theta_grid.size() < 2 || p_grid.size() < 2) throw InvalidParameter("sinogram grids need at least 2 samples");
  if (values.size() != theta_grid.size() * p_grid.size())
    throw InvalidParameter("sinogram values do not match the grid size");
  auto check_uniform = [](const std::vector<double>& g, const char* name) {
    const double step = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double d = g[i] - g[i - 1];
      if (!(d > 0.0)) throw InvalidParameter(std::string(name) + " grid is not strictly increasing");
      if (std::abs(d - step) > 1e-6 * step) throw InvalidParameter(std::string(name) + " grid is not uniform");
    }
  };
  check_uniform(theta_grid, "theta");
  check_uniform(p_grid, "p");
  if (theta_grid.front() < 0.0 || theta_grid.back() >= kPi) throw InvalidParameter("theta grid must lie in [0, pi)");
  for (double v : values)
    if (!std::isfinite(v)) throw InvalidParameter("sinogram contains non-finite values");
}

double radon_analytic(const Phantom& phantom, double theta, double p) {
  switch (phantom.shape()) {
    case PhantomShape::Disk:
      return chord(phantom.parameters()[0], p);
    case PhantomShape::Annulus: {
      const double b = phantom.parameters()[0], a = phantom.parameters()[1];
      return chord(a, p) - chord(b, p);
    }
    case PhantomShape::Polygon:
    case PhantomShape::ParabolaRegion:
      return clipped_length(phantom, make_line(theta, p));
    case PhantomShape::Custom:
      break;
  }
  throw NotImplemented("no closed-form Radon transform for custom phantoms");
}

double radon_numeric(const Phantom& phantom, double theta, double p, double step) {
  if (!(step > 0.0)) throw InvalidParameter("quadrature step must be positive");
  const Line line = make_line(theta, p);
  double t0 = 0.0, t1 = 0.0;
  if (!clip_to_box(line, phantom.bounds(), t0, t1)) return 0.0;
  const auto cells = static_cast<std::size_t>(std::ceil((t1 - t0) / step));
  if (cells == 0) return 0.0;
  const double h = (t1 - t0) / static_cast<double>(cells);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < cells; ++i)
    if (phantom.contains(line.base + (t0 + (static_cast<double>(i) + 0.5) * h) * line.dir)) ++inside;
  return static_cast<double>(inside) * h;
}

PRange default_p_range(const Phantom& phantom) {
  const double r = 1.2 * phantom.support_radius();
  return {-r, r};
}

Sinogram make_sinogram(const Phantom& phantom, std::size_t n_theta, std::size_t n_p, std::optional<PRange> p_range,
                       std::optional<NoiseSpec> noise) {
  if (n_theta < 2) throw InvalidParameter("n_theta must be at least 2");
  if (n_p < 8) throw InvalidParameter("n_p must be at least 8");
  const PRange range = p_range.value_or(default_p_range(phantom));
  if (!(range.hi > range.lo)) throw InvalidParameter("p range must be nonempty");
  if (noise && !(noise->level >= 0.0)) throw InvalidParameter("noise level must be nonnegative");

  Sinogram s;
  s.theta_grid.resize(n_theta);
  for (std::size_t i = 0; i < n_theta; ++i) s.theta_grid[i] = kPi * static_cast<double>(i) / static_cast<double>(n_theta);
  s.p_grid.resize(n_p);
  const double dp = (range.hi - range.lo) / static_cast<double>(n_p - 1);
  for (std::size_t j = 0; j < n_p; ++j) s.p_grid[j] = range.lo + dp * static_cast<double>(j);
  s.p_grid.back() = range.hi;
  s.noise = noise;
  const double r = phantom.support_radius();
  s.coverage_warning = range.lo > -r || range.hi < r;

  const bool analytic = phantom.shape() != PhantomShape::Custom;
  const double step = 1e-3 * std::max(r, 1e-12);
  s.values.assign(n_theta * n_p, 0.0);
  parallel_for(n_theta, [&](std::size_t i) {
    double* row = s.values.data() + i * n_p;
    for (std::size_t j = 0; j < n_p; ++j)
      row[j] = analytic ? radon_analytic(phantom, s.theta_grid[i], s.p_grid[j])
                        : radon_numeric(phantom, s.theta_grid[i], s.p_grid[j], step);
    if (!noise || noise->level == 0.0) return;
    // One stream per theta row keeps the draw independent of scheduling.
    std::seed_seq seq{static_cast<std::uint32_t>(noise->seed), static_cast<std::uint32_t>(noise->seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    if (noise->model == NoiseModel::Uniform) {
      std::uniform_real_distribution<double> dist(-noise->level, noise->level);
      for (std::size_t j = 0; j < n_p; ++j) row[j] += dist(rng);
    } else {
      std::normal_distribution<double> dist(0.0, noise->level);
      for (std::size_t j = 0; j < n_p; ++j) row[j] += dist(rng);
    }
  });
  return s;
}

}  // namespace radon_edges
