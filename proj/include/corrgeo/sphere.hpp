#pragma once

#include "corrgeo/types.hpp"

namespace corrgeo {

/// A point of the unit sphere S^{k-1}.
class SpherePoint {
public:
  /// Accepts coordinates within 1e-10 of unit norm and renormalizes them.
  explicit SpherePoint(Vector coords);

  /// Projects any non-zero vector onto the sphere.
  static SpherePoint normalize(const Vector& v);

  const Vector& coords() const noexcept { return coords_; }
  Eigen::Index dim() const noexcept { return coords_.size(); }

private:
  Vector coords_;
};

/// A tangent vector v at base, with <base, v> = 0.
class SphereTangent {
public:
  SphereTangent(SpherePoint base, Vector vec);

  const SpherePoint& base() const noexcept { return base_; }
  const Vector& vec() const noexcept { return vec_; }

private:
  SpherePoint base_;
  Vector vec_;
};

/// Geodesic angle between two unit vectors in [0, pi]:
/// 2 atan2(||x - y||, ||x + y||), which equals arccos(<x,y>) but stays
/// accurate near 0 and pi and is exactly symmetric.
double unit_angle(const Vector& x, const Vector& y);

double sphere_dist(const SpherePoint& x, const SpherePoint& y);

SpherePoint sphere_exp(const SpherePoint& x, const SphereTangent& v);

/// Throws AntipodalLogarithm when the angle exceeds pi - antipodal_guard.
SphereTangent sphere_log(const SpherePoint& x, const SpherePoint& y,
                         double antipodal_guard = 1e-6);

SphereTangent sphere_project(const SpherePoint& x, const Vector& w);

/// (x + v) / ||x + v||. Throws RetractionFailure when x + v = 0.
SpherePoint sphere_retract(const SpherePoint& x, const SphereTangent& v);

// Unchecked vector kernels shared with the product-sphere code.
namespace detail {
Vector exp_unit(const Vector& x, const Vector& v);
Vector log_unit(const Vector& x, const Vector& y);
} // namespace detail

} // namespace corrgeo
