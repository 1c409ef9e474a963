#pragma once

// Slow, independent reference computations used to check the solvers.
// Nothing here calls the optimizers; only loss evaluation is shared.

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "corrgeo/errors.hpp"
#include "corrgeo/product_sphere.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo::oracle {

struct GridSpec {
  int resolution = 10000;  // samples per angle; must be >= 8
  bool include_reflections = true;
};

struct GridDistance {
  double distance = 0.0;
  double angle = 0.0;          // minimizing grid angle
  bool reflection = false;     // minimum found on the reflection branch
  double error_bound = 0.0;    // sqrt(m) * pi * (2 pi / resolution)
};

/// Brute-force orbit distance for k = 2: minimizes
/// sqrt(sum_i arccos^2 <(X O)_i, Y_i>) over rotations and (optionally)
/// reflections at `resolution` equally spaced angles. Throws InvalidInput
/// when k != 2.
GridDistance o2_grid_distance(const UnitRowMatrix& x, const UnitRowMatrix& y,
                              const GridSpec& grid = {});

struct FiniteDifference {
  Vector derivatives;   // Richardson-extrapolated directional derivatives
  Vector error_estimate;  // |D(h) - D(h/2)| per direction
};

/// Central differences (f(R(p, +h e)) - f(R(p, -h e))) / 2h along every
/// basis direction e, evaluated at h and h/2 and Richardson-combined.
/// Throws InvalidInput for h outside [1e-8, 1e-3] or a non-finite loss.
template <class Point, class Direction>
FiniteDifference fd_gradient(const std::function<double(const Point&)>& loss,
                             const std::function<Point(const Point&, const Direction&)>& retract,
                             const Point& point, const std::vector<Direction>& basis,
                             double h = 1e-5) {
  if (!(h >= 1e-8 && h <= 1e-3)) fail(ErrorKind::InvalidInput, "finite-difference step out of range");
  const auto n = static_cast<Eigen::Index>(basis.size());
  FiniteDifference out{Vector(n), Vector(n)};
  auto central = [&](const Direction& e, double step) {
    const double plus = loss(retract(point, step * e));
    const double minus = loss(retract(point, -step * e));
    if (!std::isfinite(plus) || !std::isfinite(minus))
      fail(ErrorKind::InvalidInput, "loss is not finite");
    return (plus - minus) / (2.0 * step);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& e = basis[static_cast<std::size_t>(i)];
    const double coarse = central(e, h);
    const double fine = central(e, 0.5 * h);
    out.derivatives(i) = (4.0 * fine - coarse) / 3.0;
    out.error_estimate(i) = std::abs(fine - coarse);
  }
  return out;
}

/// Grid minimizer on the unit circle of sum_i w_i arccos^2 <p_i, (cos t, sin t)>.
/// Returns the first minimizing grid point.
Vector exhaustive_small_frechet(const std::vector<Vector>& points, std::span<const double> weights,
                                int resolution);

} // namespace corrgeo::oracle
