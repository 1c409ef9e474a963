#include "corrgeo/fixed_rank_quotient.hpp"

#include <algorithm>

#include "corrgeo/errors.hpp"
#include "corrgeo/matrix_kernels.hpp"

namespace corrgeo {

HorizontalTangent::HorizontalTangent(UnitRowMatrix base, Matrix vec, double horiz_tol)
    : tangent_(std::move(base), std::move(vec)) {
  const double residual = horizontality_residual(tangent_.base(), tangent_.vec());
  if (residual > horiz_tol * std::max(1.0, tangent_.vec().norm()))
    fail(ErrorKind::InvalidInput, "tangent is not horizontal");
}

double horizontality_residual(const UnitRowMatrix& x, const Matrix& v) {
  const Matrix vtx = v.transpose() * x.matrix();
  return (vtx - vtx.transpose()).norm();
}

void require_full_rank(const UnitRowMatrix& x, const RankTolerance& tol) {
  if (numerical_rank(x.matrix(), tol) < x.k())
    fail(ErrorKind::SingularSylvester, "base point is not of full rank k");
}

Matrix vertical_generator(const UnitRowMatrix& x, const ProductTangent& w,
                          const RankTolerance& tol) {
  if (w.base().matrix() != x.matrix())
    fail(ErrorKind::InvalidInput, "tangent is based at a different point");
  require_full_rank(x, tol);
  const Matrix& b = x.matrix();
  const Matrix gram = b.transpose() * b;
  const Matrix rhs = b.transpose() * w.vec() - w.vec().transpose() * b;
  return sylvester_spd(gram, rhs, tol);
}

ProductTangent vertical_project(const UnitRowMatrix& x, const ProductTangent& w,
                                const RankTolerance& tol) {
  const Matrix a = vertical_generator(x, w, tol);
  return ProductTangent(x, x.matrix() * skew(a));
}

HorizontalTangent horizontal_project(const UnitRowMatrix& x, const ProductTangent& w,
                                     const RankTolerance& tol) {
  const ProductTangent vertical = vertical_project(x, w, tol);
  return HorizontalTangent(x, w.vec() - vertical.vec());
}

double quotient_metric(const UnitRowMatrix& x, const HorizontalTangent& u,
                       const HorizontalTangent& v) {
  if (u.base().matrix() != x.matrix() || v.base().matrix() != x.matrix())
    fail(ErrorKind::InvalidInput, "horizontal tangents must be based at X");
  return ps_metric(u.tangent(), v.tangent());
}

HorizontalTangent lift_gradient(const UnitRowMatrix& x, const Matrix& euclidean_grad,
                                const RankTolerance& tol) {
  return horizontal_project(x, ps_project(x, euclidean_grad), tol);
}

} // namespace corrgeo
