#include "corrgeo/oracle.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace corrgeo::oracle {

namespace {

// Plain arccos, independent of the atan2 form used by the library.
double squared_angle(double c) {
  const double a = std::acos(std::clamp(c, -1.0, 1.0));
  return a * a;
}

} // namespace

GridDistance o2_grid_distance(const UnitRowMatrix& x, const UnitRowMatrix& y, const GridSpec& grid) {
  if (x.k() != 2 || y.k() != 2) fail(ErrorKind::InvalidInput, "grid oracle needs k = 2");
  if (x.m() != y.m()) fail(ErrorKind::InvalidInput, "row counts differ");
  if (grid.resolution < 8) fail(ErrorKind::InvalidInput, "grid resolution must be at least 8");

  GridDistance best{std::numeric_limits<double>::infinity(), 0.0, false, 0.0};
  const Matrix& a = x.matrix();
  const Matrix& b = y.matrix();
  const int branches = grid.include_reflections ? 2 : 1;
  for (int branch = 0; branch < branches; ++branch) {
    for (int s = 0; s < grid.resolution; ++s) {
      const double t = 2.0 * std::numbers::pi * s / grid.resolution;
      const double c = std::cos(t);
      const double sn = std::sin(t);
      // Rotation [[c, -s], [s, c]] or reflection [[c, s], [s, -c]].
      double loss = 0.0;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double u = a(i, 0);
        const double v = a(i, 1);
        const double r0 = u * c + v * sn;
        const double r1 = branch == 0 ? -u * sn + v * c : u * sn - v * c;
        loss += squared_angle(r0 * b(i, 0) + r1 * b(i, 1));
      }
      if (loss < best.distance) {
        best.distance = loss;
        best.angle = t;
        best.reflection = branch == 1;
      }
    }
  }
  best.distance = std::sqrt(best.distance);
  best.error_bound = std::sqrt(static_cast<double>(a.rows())) * std::numbers::pi *
                     (2.0 * std::numbers::pi / grid.resolution);
  return best;
}

Vector exhaustive_small_frechet(const std::vector<Vector>& points, std::span<const double> weights,
                                int resolution) {
  if (points.empty() || points.size() != weights.size())
    fail(ErrorKind::InvalidInput, "points and weights must be non-empty and aligned");
  if (resolution < 8) fail(ErrorKind::InvalidInput, "grid resolution must be at least 8");
  double best = std::numeric_limits<double>::infinity();
  Vector arg(2);
  for (int s = 0; s < resolution; ++s) {
    const double t = 2.0 * std::numbers::pi * s / resolution;
    const double c = std::cos(t);
    const double sn = std::sin(t);
    double loss = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i)
      loss += weights[i] * squared_angle(points[i](0) * c + points[i](1) * sn);
    if (loss < best) {
      best = loss;
      arg << c, sn;
    }
  }
  return arg;
}

} // namespace corrgeo::oracle
