#include "radon_edges/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "radon_edges/errors.hpp"
#include "radon_edges/parallel.hpp"

namespace radon_edges {
namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  double m = *mid;
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), mid));
  return m;
}

// Golden-section search for the minimum of f on [lo, hi].
template <class F>
std::pair<double, double> golden_min(F&& f, double lo, double hi, int iterations) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo), b = lo + kInvPhi * (hi - lo);
  double fa = f(a), fb = f(b);
  for (int i = 0; i < iterations; ++i) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = f(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = f(b);
    }
  }
  return fa < fb ? std::pair{a, fa} : std::pair{b, fb};
}

// Linear least squares for c0 + c1*u + c2*u^2 + A*(side*u)_+^e with the
// location and exponent held fixed; u is measured in grid steps.
struct WindowFit {
  std::span<const double> u;  // sample offsets from the window anchor, in steps
  std::span<const double> v;

  double solve(double shift, double e, int side, Eigen::Vector4d* coef = nullptr) const {
    Eigen::Matrix4d ata = Eigen::Matrix4d::Zero();
    Eigen::Vector4d atb = Eigen::Vector4d::Zero();
    double btb = 0.0;
    bool any_singular = false;
    for (std::size_t k = 0; k < u.size(); ++k) {
      const double z = u[k] - shift;
      const double sz = side * z;
      const double s = sz > 0.0 ? std::pow(sz, e) : 0.0;
      any_singular = any_singular || s > 0.0;
      const Eigen::Vector4d row(1.0, z, z * z, s);
      ata.noalias() += row * row.transpose();
      atb.noalias() += row * v[k];
      btb += v[k] * v[k];
    }
    if (!any_singular) return std::numeric_limits<double>::infinity();
    const Eigen::Vector4d c = ata.ldlt().solve(atb);
    if (coef) *coef = c;
    return std::max(0.0, btb - 2.0 * c.dot(atb) + c.dot(ata * c));
  }
};

}  // namespace

const char* to_string(SingularityClass c) {
  switch (c) {
    case SingularityClass::SmoothFold: return "smooth-fold";
    case SingularityClass::Corner: return "corner";
    case SingularityClass::Unclassified: return "unclassified";
  }
  return "unclassified";
}

SingularityClass singularity_class_from_string(const char* name) {
  if (std::strcmp(name, "smooth-fold") == 0) return SingularityClass::SmoothFold;
  if (std::strcmp(name, "corner") == 0) return SingularityClass::Corner;
  if (std::strcmp(name, "unclassified") == 0) return SingularityClass::Unclassified;
  throw InvalidParameter(std::string("unknown singularity class '") + name + "'");
}

SingularityClass classify_exponent(double exponent, double tolerance) {
  if (std::abs(exponent - 0.5) <= tolerance) return SingularityClass::SmoothFold;
  if (std::abs(exponent - 1.0) <= tolerance) return SingularityClass::Corner;
  return SingularityClass::Unclassified;
}

LocalSingularModel fit_local_model(std::span<const double> values, double p0, double dp, std::size_t index,
                                   const DetectionConfig& config, double noise_scale) {
  const std::size_t n = values.size();
  const std::size_t half = std::max(config.model_window, config.fit_window + 3);
  if (n < 2 * config.fit_window + 3) throw InsufficientData("profile shorter than the fit window");
  const std::size_t lo = index > half ? index - half : 0;
  const std::size_t hi = std::min(n - 1, index + half);

  std::vector<double> u, v;
  for (std::size_t k = lo; k <= hi; ++k) {
    u.push_back(static_cast<double>(k) - static_cast<double>(index));
    v.push_back(values[k]);
  }
  const WindowFit fit{u, v};

  // Coarse scan, then alternating golden refinement of (shift, exponent).
  static constexpr double kShifts[] = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  static constexpr double kExponents[] = {0.3, 0.45, 0.6, 0.8, 1.0, 1.25, 1.6, 2.0};
  double best_ssr = std::numeric_limits<double>::infinity();
  double best_shift = 0.0, best_e = 1.0;
  int best_side = 1;
  for (int side : {1, -1}) {
    double s_ssr = std::numeric_limits<double>::infinity(), s_shift = 0.0, s_e = 1.0;
    for (double sh : kShifts)
      for (double e : kExponents) {
        const double r = fit.solve(sh, e, side);
        if (r < s_ssr) {
          s_ssr = r;
          s_shift = sh;
          s_e = e;
        }
      }
    if (!std::isfinite(s_ssr)) continue;
    // The misfit is smooth in the shift only between grid nodes, so each
    // unit interval is refined on its own.
    const double coarse_e = s_e;
    for (double left : {-2.0, -1.0, 0.0, 1.0}) {
      auto by_shift = [&](double sh) {
        return golden_min([&](double e) { return fit.solve(sh, e, side); }, std::max(0.05, coarse_e - 0.6),
                          coarse_e + 0.6, 28)
            .second;
      };
      const auto [sh, r] = golden_min(by_shift, left, left + 1.0, 24);
      const auto [e, r2] = golden_min([&](double ee) { return fit.solve(sh, ee, side); },
                                      std::max(0.05, coarse_e - 0.6), coarse_e + 0.6, 36);
      (void)r;
      if (r2 <= s_ssr) {
        s_ssr = r2;
        s_shift = sh;
        s_e = e;
      }
    }
    if (s_ssr < best_ssr) {
      best_ssr = s_ssr;
      best_shift = s_shift;
      best_e = s_e;
      best_side = side;
    }
  }

  LocalSingularModel m;
  m.side = best_side;
  m.location = p0 + (static_cast<double>(index) + best_shift) * dp;
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
  if (std::isfinite(best_ssr)) fit.solve(best_shift, best_e, best_side, &c);
  m.smooth = {c[0], c[1] / dp, c[2] / (dp * dp)};
  m.amplitude = c[3] / std::pow(dp, best_e);
  m.residual = std::sqrt(std::max(0.0, best_ssr) / static_cast<double>(u.size()));
  m.exponent = best_e;
  m.exponent_ci = 1.0;

  // Exponent: slope of log|R - smooth| against log|z| on the nonsmooth side.
  struct Pt {
    double z, r;
  };
  std::vector<Pt> pts;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double z = m.side * (u[k] - best_shift);
    if (z < 0.5) continue;
    const double zz = u[k] - best_shift;
    const double r = v[k] - (c[0] + c[1] * zz + c[2] * zz * zz);
    pts.push_back({z, r});
  }
  std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) { return a.z < b.z; });
  if (pts.size() > config.fit_window) pts.resize(config.fit_window);
  const double sign = c[3] >= 0.0 ? 1.0 : -1.0;
  std::vector<double> xs, ys, ws;
  constexpr double kModelError = 0.01;
  for (const Pt& pt : pts) {
    const double r = sign * pt.r;
    if (!(r > 0.0)) continue;
    xs.push_back(std::log(pt.z * dp));
    ys.push_back(std::log(r));
    const double rel = noise_scale / r;
    ws.push_back(1.0 / (rel * rel + kModelError * kModelError));
  }
  if (xs.size() >= 3) {
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sw += ws[i];
      sx += ws[i] * xs[i];
      sy += ws[i] * ys[i];
    }
    const double mx = sx / sw, my = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
      sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      double sres = 0.0;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d = ys[i] - (my + slope * (xs[i] - mx));
        sres += ws[i] * d * d;
      }
      const double dof = static_cast<double>(xs.size()) - 2.0;
      const double se = dof > 0 ? std::sqrt(sres / dof / sxx) : 1.0;
      if (slope > 0.0) {
        m.exponent = slope;
        m.exponent_ci = 2.0 * se;
      }
    }
  }
  return m;
}

std::vector<Detection> detect_profile(std::span<const double> values, double p0, double dp,
                                      const DetectionConfig& config) {
  const std::size_t n = values.size();
  if (n < 32 || n < 2 * config.fit_window + 3) throw InsufficientData("column shorter than the detection window");
  double vmax = 0.0;
  for (double v : values) vmax = std::max(vmax, std::abs(v));
  if (vmax == 0.0) return {};

  // Robust z-scores of second differences at strides 1, 2 and 4. A kink
  // grows linearly with the stride while the noise level stays fixed, so the
  // wider strides pick up weak corners that stride 1 leaves in the noise.
  std::vector<double> stat(n, 0.0);
  double scale = 0.0;
  for (std::size_t s : {1u, 2u, 4u}) {
    std::vector<double> d2(n, 0.0), nonzero;
    for (std::size_t j = s; j + s < n; ++j) {
      d2[j] = values[j + s] - 2.0 * values[j] + values[j - s];
      if (d2[j] != 0.0) nonzero.push_back(d2[j]);
    }
    // Exactly-zero second differences (outside the support, exactly linear
    // stretches) carry no information about the noise level.
    const double center = median(nonzero);
    std::vector<double> dev;
    dev.reserve(nonzero.size());
    for (double d : nonzero) dev.push_back(std::abs(d - center));
    const double sc = std::max(1.4826 * median(dev), 1e-9 * vmax);
    if (s == 1) scale = sc;
    for (std::size_t j = s; j + s < n; ++j) stat[j] = std::max(stat[j], std::abs(d2[j] - center) / sc);
  }

  // Runs above threshold; gaps of up to two samples are bridged.
  std::vector<std::size_t> peaks;
  std::vector<double> peak_stat;
  std::size_t j = 1;
  while (j + 1 < n) {
    if (stat[j] <= config.threshold) {
      ++j;
      continue;
    }
    std::size_t best = j, last = j;
    std::size_t k = j;
    while (k + 1 < n && k <= last + 3) {
      if (stat[k] > config.threshold) {
        last = k;
        if (stat[k] > stat[best]) best = k;
      }
      ++k;
    }
    peaks.push_back(best);
    peak_stat.push_back(stat[best]);
    j = last + 1;
  }

  std::vector<Detection> out;
  const double noise = scale / std::sqrt(6.0);
  std::size_t i = 0;
  while (i < peaks.size()) {
    std::size_t strongest = i, end = i;
    while (end + 1 < peaks.size() && peaks[end + 1] - peaks[end] < config.fit_window) {
      ++end;
      if (peak_stat[end] > peak_stat[strongest]) strongest = end;
    }
    Detection d;
    d.model = fit_local_model(values, p0, dp, peaks[strongest], config, noise);
    d.p = d.model.location;
    d.merged = end > i;
    d.cls = d.merged ? SingularityClass::Unclassified : classify_exponent(d.model.exponent, config.exponent_tolerance);
    out.push_back(d);
    i = end + 1;
  }
  return out;
}

std::vector<Detection> detect_column(const Sinogram& sinogram, std::size_t theta_index,
                                     const DetectionConfig& config) {
  if (theta_index >= sinogram.n_theta()) throw InvalidParameter("theta index out of range");
  const auto col = sinogram.column(theta_index);
  return detect_profile(col, sinogram.p_grid.front(), sinogram.p_step(), config);
}

std::vector<std::vector<Detection>> detect_all_columns(const Sinogram& sinogram, const DetectionConfig& config) {
  std::vector<std::vector<Detection>> out(sinogram.n_theta());
  parallel_for(sinogram.n_theta(), [&](std::size_t i) { out[i] = detect_column(sinogram, i, config); });
  return out;
}

std::vector<double> SingularBranch::betas() const {
  std::vector<double> b;
  b.reserve(samples.size());
  for (const auto& s : samples) b.push_back(s.beta);
  return b;
}

std::vector<double> SingularBranch::qs() const {
  std::vector<double> q;
  q.reserve(samples.size());
  for (const auto& s : samples) q.push_back(s.q);
  return q;
}

namespace {

struct ColumnFrame {
  double along = 0.0;   // alpha component along the chart's abscissa
  double across = 0.0;  // alpha component dividing q
};

ColumnFrame frame(double theta, Chart chart) {
  const double c = std::cos(theta), s = std::sin(theta);
  return chart == Chart::A ? ColumnFrame{c, s} : ColumnFrame{s, c};
}

struct OpenBranch {
  std::vector<BranchSample> samples;
  std::vector<int> sides;
  std::vector<double> amplitudes;
  std::size_t last_column = 0;
  bool open = true;

  // Majority class of the unshared samples once at least three agree.
  SingularityClass dominant() const {
    std::size_t fold = 0, corner = 0;
    for (const auto& s : samples) {
      if (s.shared) continue;
      if (s.cls == SingularityClass::SmoothFold) ++fold;
      if (s.cls == SingularityClass::Corner) ++corner;
    }
    if (fold >= 3 && fold >= 2 * corner) return SingularityClass::SmoothFold;
    if (corner >= 3 && corner >= 2 * fold) return SingularityClass::Corner;
    return SingularityClass::Unclassified;
  }

  // Linear prediction from the last few unshared samples.
  bool predict(double beta, double& q) const {
    std::vector<const BranchSample*> pts;
    for (auto it = samples.rbegin(); it != samples.rend() && pts.size() < 4; ++it)
      if (!it->shared) pts.push_back(&*it);
    if (pts.size() < 2) {
      pts.clear();
      for (auto it = samples.rbegin(); it != samples.rend() && pts.size() < 4; ++it) pts.push_back(&*it);
    }
    if (pts.size() < 2) {
      q = samples.back().q;
      return false;
    }
    double mb = 0, mq = 0;
    for (auto* p : pts) {
      mb += p->beta;
      mq += p->q;
    }
    mb /= pts.size();
    mq /= pts.size();
    double sbb = 0, sbq = 0;
    for (auto* p : pts) {
      sbb += (p->beta - mb) * (p->beta - mb);
      sbq += (p->beta - mb) * (p->q - mq);
    }
    const double slope = sbb > 0 ? sbq / sbb : 0.0;
    q = mq + slope * (beta - mb);
    return true;
  }
};

}  // namespace

std::vector<std::size_t> chart_columns(const Sinogram& sinogram, Chart chart, double beta_max) {
  std::vector<std::pair<double, std::size_t>> cols;
  for (std::size_t i = 0; i < sinogram.n_theta(); ++i) {
    const ColumnFrame f = frame(sinogram.theta_grid[i], chart);
    if (std::abs(f.across) < 1e-12) continue;
    const double beta = -f.along / f.across;
    if (std::abs(beta) <= beta_max) cols.emplace_back(beta, i);
  }
  std::sort(cols.begin(), cols.end());
  std::vector<std::size_t> out;
  for (const auto& c : cols) out.push_back(c.second);
  return out;
}

std::vector<SingularBranch> link_branches(const std::vector<std::vector<Detection>>& per_column,
                                          const Sinogram& sinogram, Chart chart, const DetectionConfig& config) {
  if (per_column.size() != sinogram.n_theta()) throw InvalidParameter("detections do not match the sinogram");
  const auto columns = chart_columns(sinogram, chart, config.chart_beta_max);
  const double dp = sinogram.p_step();
  double x_max = 0.0;
  for (double p : sinogram.p_grid) x_max = std::max(x_max, std::abs(p));

  std::vector<OpenBranch> branches;
  for (std::size_t order = 0; order < columns.size(); ++order) {
    const std::size_t col = columns[order];
    const ColumnFrame f = frame(sinogram.theta_grid[col], chart);
    const double beta = -f.along / f.across;
    const auto& dets = per_column[col];

    for (auto& b : branches)
      if (b.open && order - b.last_column > config.max_link_gap + 1) b.open = false;

    struct Candidate {
      double cost;
      std::size_t branch, det;
    };
    std::vector<Candidate> cands;
    for (std::size_t bi = 0; bi < branches.size(); ++bi) {
      const auto& b = branches[bi];
      if (!b.open) continue;
      double q_pred = 0.0;
      const bool has_slope = b.predict(beta, q_pred);
      double gate = config.link_gate * dp * (1.0 + beta * beta);
      if (!has_slope) gate += std::abs(beta - b.samples.back().beta) * x_max;
      const SingularityClass cls = b.dominant();
      for (std::size_t di = 0; di < dets.size(); ++di) {
        // Fold and corner families may touch; keep them apart.
        const auto dc = dets[di].cls;
        if (!dets[di].shareable() && cls != SingularityClass::Unclassified && dc != cls) continue;
        const double q = -dets[di].p / f.across;
        const double r = std::abs(q - q_pred);
        if (r <= gate) cands.push_back({r / gate, bi, di});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
    std::vector<bool> branch_used(branches.size(), false), det_used(dets.size(), false);
    std::vector<bool> det_claimed(dets.size(), false);
    for (const auto& c : cands) {
      if (branch_used[c.branch]) continue;
      if (det_used[c.det]) continue;
      const Detection& d = dets[c.det];
      branch_used[c.branch] = true;
      det_claimed[c.det] = true;
      if (!d.shareable()) det_used[c.det] = true;
      auto& b = branches[c.branch];
      b.samples.push_back({beta, -d.p / f.across, d.model.exponent, d.cls, d.shareable()});
      b.sides.push_back(d.model.side * (f.across > 0 ? -1 : 1));
      b.amplitudes.push_back(std::abs(d.model.amplitude));
      b.last_column = order;
    }
    for (std::size_t di = 0; di < dets.size(); ++di) {
      if (det_claimed[di]) continue;
      const Detection& d = dets[di];
      OpenBranch nb;
      nb.samples.push_back({beta, -d.p / f.across, d.model.exponent, d.cls, d.shareable()});
      nb.sides.push_back(d.model.side * (f.across > 0 ? -1 : 1));
      nb.amplitudes.push_back(std::abs(d.model.amplitude));
      nb.last_column = order;
      branches.push_back(std::move(nb));
    }
  }

  std::vector<SingularBranch> out;
  for (auto& b : branches) {
    if (b.samples.size() < config.min_branch_length) continue;
    SingularBranch sb;
    sb.chart = chart;
    sb.p_step = dp;
    sb.samples = std::move(b.samples);

    std::vector<double> es;
    for (const auto& s : sb.samples)
      if (!s.shared) es.push_back(s.exponent);
    if (es.empty())
      for (const auto& s : sb.samples) es.push_back(s.exponent);
    const double med = median(es);
    std::vector<double> dev;
    for (double e : es) dev.push_back(std::abs(e - med));
    const double spread = std::max(1.4826 * median(dev), 0.02);
    double sum = 0.0, sum2 = 0.0;
    std::size_t count = 0;
    for (double e : es)
      if (std::abs(e - med) <= 3.0 * spread) {
        sum += e;
        sum2 += e * e;
        ++count;
      }
    sb.exponent = sum / static_cast<double>(count);
    const double var = std::max(0.0, sum2 / count - sb.exponent * sb.exponent);
    sb.exponent_ci = std::max(2.0 * std::sqrt(var / static_cast<double>(count)), 1e-3);
    sb.cls = classify_exponent(sb.exponent, config.exponent_tolerance);
    const int side_sum = std::accumulate(b.sides.begin(), b.sides.end(), 0);
    sb.side = side_sum >= 0 ? 1 : -1;
    sb.strength = median(b.amplitudes);
    sb.affine = is_affine(sb, config);
    out.push_back(std::move(sb));
  }
  return out;
}

std::vector<double> branch_second_difference(const SingularBranch& branch) {
  const std::size_t n = branch.samples.size();
  if (n < 5) throw InsufficientData("branch needs at least 5 samples for second differences");
  const std::size_t s = std::max<std::size_t>(1, (n - 1) / 4);
  std::vector<double> out;
  for (std::size_t k = s; k + s < n; ++k) {
    const auto& a = branch.samples[k - s];
    const auto& m = branch.samples[k];
    const auto& b = branch.samples[k + s];
    const double t = (m.beta - a.beta) / (b.beta - a.beta);
    const double chord = a.q + t * (b.q - a.q);
    out.push_back(2.0 * (chord - m.q));
  }
  return out;
}

bool is_affine(const SingularBranch& branch, const DetectionConfig& config) {
  const auto d2 = branch_second_difference(branch);
  const std::size_t s = std::max<std::size_t>(1, (branch.samples.size() - 1) / 4);
  for (std::size_t i = 0; i < d2.size(); ++i) {
    const double beta = branch.samples[i + s].beta;
    const double gate = config.affine_gate * branch.p_step * std::sqrt(1.0 + beta * beta);
    if (std::abs(d2[i]) > gate) return false;
  }
  return true;
}

std::vector<SingularBranch> detect_branches(const Sinogram& sinogram, const DetectionConfig& config) {
  sinogram.validate();
  const auto per_column = detect_all_columns(sinogram, config);
  auto branches = link_branches(per_column, sinogram, Chart::A, config);
  auto more = link_branches(per_column, sinogram, Chart::B, config);
  branches.insert(branches.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return branches;
}

}  // namespace radon_edges
