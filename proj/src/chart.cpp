#include "radon_edges/chart.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "radon_edges/errors.hpp"

namespace radon_edges {

const char* to_string(Chart chart) { return chart == Chart::A ? "A" : "B"; }

Chart chart_from_string(const char* name) {
  if (std::strcmp(name, "A") == 0) return Chart::A;
  if (std::strcmp(name, "B") == 0) return Chart::B;
  throw InvalidParameter(std::string("unknown chart '") + name + "'");
}

Homogeneous to_homogeneous(AngleOffset line) {
  return {std::cos(line.theta), std::sin(line.theta), line.p};
}

Inhomogeneous to_inhomogeneous(Homogeneous line, Chart chart) {
  // Chart B swaps the roles of the two coordinates.
  const double along = chart == Chart::A ? line.a1 : line.a2;
  const double across = chart == Chart::A ? line.a2 : line.a1;
  if (across == 0.0)
    throw ChartExcluded(chart == Chart::A ? "line is vertical (alpha_2 = 0), outside chart A"
                                          : "line is horizontal (alpha_1 = 0), outside chart B");
  return {-along / across, -line.p / across};
}

Inhomogeneous to_inhomogeneous(AngleOffset line, Chart chart) {
  return to_inhomogeneous(to_homogeneous(line), chart);
}

AngleOffset to_angle_offset(Inhomogeneous line, Chart chart) {
  // Normal direction proportional to (-beta, 1) in chart coordinates.
  const double len = std::hypot(1.0, line.beta);
  const double p = -line.q / len;
  if (chart == Chart::A) return {std::atan2(1.0, -line.beta), p};
  return {std::atan2(-line.beta, 1.0), p};
}

double normalize_radon(double value, Homogeneous line) {
  const double len = std::hypot(line.a1, line.a2);
  if (len == 0.0) throw InvalidParameter("normalize_radon: alpha must be nonzero");
  return value / len;
}

}  // namespace radon_edges
