#include "corrgeo/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrgeo/errors.hpp"

namespace corrgeo {

namespace {
constexpr double kUnitTolerance = 1e-10;
constexpr double kTangentTolerance = 1e-10;
constexpr double kSmallAngle = 1e-12;
} // namespace

SpherePoint::SpherePoint(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() == 0 || !coords_.allFinite())
    fail(ErrorKind::InvalidInput, "sphere point must be finite and non-empty");
  const double n = coords_.norm();
  if (std::abs(n - 1.0) > kUnitTolerance)
    fail(ErrorKind::InvalidInput, "sphere point is not unit norm");
  coords_ /= n;
}

SpherePoint SpherePoint::normalize(const Vector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    fail(ErrorKind::InvalidInput, "cannot normalize a zero or non-finite vector");
  return SpherePoint(v / n);
}

SphereTangent::SphereTangent(SpherePoint base, Vector vec)
    : base_(std::move(base)), vec_(std::move(vec)) {
  if (vec_.size() != base_.dim())
    fail(ErrorKind::InvalidInput, "tangent dimension mismatch");
  if (std::abs(base_.coords().dot(vec_)) > kTangentTolerance * std::max(1.0, vec_.norm()))
    fail(ErrorKind::InvalidInput, "vector is not tangent to the sphere at its base");
}

double unit_angle(const Vector& x, const Vector& y) {
  // Half-angle form: symmetric in x and y to the last bit.
  return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

double sphere_dist(const SpherePoint& x, const SpherePoint& y) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidInput, "sphere dimension mismatch");
  return unit_angle(x.coords(), y.coords());
}

namespace detail {

Vector exp_unit(const Vector& x, const Vector& v) {
  const double n = v.norm();
  Vector out = n < kSmallAngle ? Vector(x + v)
                               : Vector(x * std::cos(n) + v * (std::sin(n) / n));
  return out / out.norm();
}

Vector log_unit(const Vector& x, const Vector& y) {
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  Vector direction = y - c * x;
  const double s = direction.norm();
  const double theta = std::atan2(s, c);
  if (theta < kSmallAngle) return direction;
  return direction * (theta / s);
}

} // namespace detail

SpherePoint sphere_exp(const SpherePoint& x, const SphereTangent& v) {
  if (v.vec().size() != x.dim()) fail(ErrorKind::InvalidInput, "sphere dimension mismatch");
  return SpherePoint(detail::exp_unit(x.coords(), v.vec()));
}

SphereTangent sphere_log(const SpherePoint& x, const SpherePoint& y, double antipodal_guard) {
  if (x.dim() != y.dim()) fail(ErrorKind::InvalidInput, "sphere dimension mismatch");
  if (unit_angle(x.coords(), y.coords()) > std::numbers::pi - antipodal_guard)
    fail(ErrorKind::AntipodalLogarithm, "logarithm of an antipodal pair is not unique");
  return SphereTangent(x, detail::log_unit(x.coords(), y.coords()));
}

SphereTangent sphere_project(const SpherePoint& x, const Vector& w) {
  if (w.size() != x.dim()) fail(ErrorKind::InvalidInput, "sphere dimension mismatch");
  const Vector& p = x.coords();
  Vector v = w - p.dot(w) * p;
  v -= p.dot(v) * p;
  return SphereTangent(x, std::move(v));
}

SpherePoint sphere_retract(const SpherePoint& x, const SphereTangent& v) {
  const Vector sum = x.coords() + v.vec();
  const double n = sum.norm();
  if (!(n > 0.0)) fail(ErrorKind::RetractionFailure, "x + v vanishes");
  return SpherePoint(sum / n);
}

} // namespace corrgeo
