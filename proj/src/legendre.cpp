#include "radon_edges/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radon_edges/errors.hpp"

namespace radon_edges {
namespace {

double leading_curvature(const std::vector<double>& x, const std::vector<double>& y) {
  // Sign of the quadratic coefficient of the least-squares parabola.
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  for (double v : x) mx += v;
  mx /= n;
  double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = x[i] - mx;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) t[k] += p * y[i];
      p *= u;
    }
  }
  // Cramer's rule on the 3x3 normal equations.
  auto det3 = [](double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
  };
  const double d = det3(s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4]);
  if (d == 0.0) return 0.0;
  return det3(s[0], s[1], t[0], s[1], s[2], t[1], s[2], s[3], t[2]) / d;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i)
    f.max_residual = std::max(f.max_residual, std::abs(y[i] - (f.intercept + f.slope * x[i])));
  return f;
}

// Lower hull of points sorted by x; collinear points are dropped.
std::vector<std::size_t> lower_hull(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double c = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (c > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace

void SampledFunction::validate() const {
  if (grid.size() != values.size()) throw InvalidParameter("grid and values differ in length");
  if (grid.size() < 3) throw InsufficientData("a sampled function needs at least 3 samples");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i]) || !std::isfinite(values[i])) throw InvalidParameter("sampled function is not finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidParameter("grid must be strictly increasing");
  }
  if (noise && !(*noise >= 0.0)) throw InvalidParameter("noise level must be nonnegative");
}

Conjugate legendre_discrete(const SampledFunction& fn) {
  fn.validate();
  const auto& x = fn.grid;
  const double delta = fn.noise.value_or(0.0);
  double scale = 0.0;
  for (double v : fn.values) scale = std::max(scale, std::abs(v));
  const double tol = 2.0 * delta + 1e-12 * (1.0 + scale);

  Conjugate out;
  out.error_constant = 1.0;

  const LineFit line = fit_line(x, fn.values);
  if (line.max_residual <= tol) {
    out.point = Point2{line.slope, -line.intercept};
    out.function.noise = delta;
    return out;
  }

  const double curvature = leading_curvature(x, fn.values);
  out.orientation = curvature < 0.0 ? Curvature::Concave : Curvature::Convex;
  const double sign = out.orientation == Curvature::Convex ? 1.0 : -1.0;
  std::vector<double> y(fn.values.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = sign * fn.values[i];

  // Local deviations from the chord must not point the wrong way.
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    const double t = (x[k] - x[k - 1]) / (x[k + 1] - x[k - 1]);
    const double chord = y[k - 1] + t * (y[k + 1] - y[k - 1]);
    if (y[k] - chord > tol)
      throw NonConvexBranch("second difference changes sign near x = " + std::to_string(x[k]) +
                            "; split the branch at inflections first");
  }

  const auto hull = lower_hull(x, y);
  if (hull.size() == 2) {
    const double slope = (y[hull[1]] - y[hull[0]]) / (x[hull[1]] - x[hull[0]]);
    const double h = slope * x[hull[0]] - y[hull[0]];
    out.point = Point2{sign * slope, -sign * h};
    out.function.noise = delta;
    return out;
  }
  std::vector<double> slopes, conj;
  std::vector<HullSegment> support;
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const std::size_t a = hull[i], b = hull[i + 1];
    const double s = (y[b] - y[a]) / (x[b] - x[a]);
    slopes.push_back(s);
    conj.push_back(s * x[a] - y[a]);
    support.push_back({x[a], x[b]});
  }
  if (out.orientation == Curvature::Concave) {
    // h(beta) = -G*(-beta) for G = -g.
    std::reverse(slopes.begin(), slopes.end());
    std::reverse(conj.begin(), conj.end());
    std::reverse(support.begin(), support.end());
    for (auto& s : slopes) s = -s;
    for (auto& c : conj) c = -c;
  }
  out.function.grid = std::move(slopes);
  out.function.values = std::move(conj);
  out.function.noise = out.error_constant * delta;
  out.support = std::move(support);
  return out;
}

std::optional<double> legendre_involution_check(const SampledFunction& fn) {
  const Conjugate first = legendre_discrete(fn);
  if (first.point || first.function.grid.size() < 3) return std::nullopt;
  const Conjugate second = legendre_discrete(first.function);
  if (second.point || second.function.grid.size() < 2) return std::nullopt;
  const auto& gx = second.function.grid;
  const auto& gy = second.function.values;
  double worst = 0.0;
  for (std::size_t i = 0; i < fn.grid.size(); ++i) {
    const double xi = fn.grid[i];
    if (xi < gx.front() || xi > gx.back()) continue;
    auto it = std::upper_bound(gx.begin(), gx.end(), xi);
    std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - gx.begin(), 1, gx.size() - 1));
    const double t = (xi - gx[k - 1]) / (gx[k] - gx[k - 1]);
    const double v = gy[k - 1] + t * (gy[k] - gy[k - 1]);
    worst = std::max(worst, std::abs(v - fn.values[i]));
  }
  return worst;
}

double hessian_reciprocity_check(const SampledFunction& fn) {
  if (fn.grid.size() < 5) throw InsufficientData("reciprocity check needs at least 5 samples");
  const Conjugate conj = legendre_discrete(fn);
  if (conj.point) throw NonConvexBranch("affine input has no invertible Hessian");
  const auto& x = fn.grid;
  const auto& y = fn.values;

  // g'' at interior input samples, nonuniform three-point formula.
  std::vector<double> gx, g2;
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    const double h0 = x[k] - x[k - 1], h1 = x[k + 1] - x[k];
    gx.push_back(x[k]);
    g2.push_back(2.0 * ((y[k + 1] - y[k]) / h1 - (y[k] - y[k - 1]) / h0) / (h0 + h1));
  }
  auto g2_at = [&](double xm) -> std::optional<double> {
    if (xm < gx.front() || xm > gx.back()) return std::nullopt;
    auto it = std::upper_bound(gx.begin(), gx.end(), xm);
    std::size_t k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - gx.begin(), 1, gx.size() - 1));
    const double t = (xm - gx[k - 1]) / (gx[k] - gx[k - 1]);
    return g2[k - 1] + t * (g2[k] - g2[k - 1]);
  };

  const auto& s = conj.function.grid;
  const auto& h = conj.function.values;
  double worst = 0.0;
  bool any = false;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h2 = 2.0 * ((h[i + 1] - h[i]) / (s[i + 1] - s[i]) - (h[i] - h[i - 1]) / (s[i] - s[i - 1])) /
                      (s[i + 1] - s[i - 1]);
    const auto g = g2_at(0.5 * (conj.support[i].x_left + conj.support[i].x_right));
    if (!g) continue;
    worst = std::max(worst, std::abs(*g * h2 - 1.0));
    any = true;
  }
  if (!any) throw InsufficientData("no interior samples for the reciprocity check");
  return worst;
}

double legendre_pointwise(const std::function<double(double)>& g, const std::function<double(double)>& dg,
                          double beta, double lo, double hi) {
  double flo = dg(lo) - beta, fhi = dg(hi) - beta;
  if (flo * fhi > 0.0) throw InvalidParameter("slope is outside the derivative's range on the interval");
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = dg(mid) - beta;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double y = 0.5 * (lo + hi);
  return beta * y - g(y);
}

}  // namespace radon_edges
