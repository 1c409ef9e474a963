#pragma once

#include "corrgeo/product_sphere.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// A horizontal tangent at a full-rank base: tangent to the product of
/// spheres and with vec^T base symmetric.
class HorizontalTangent {
public:
  /// Checks both invariants; horizontality relative to max(1, ||vec||_F).
  HorizontalTangent(UnitRowMatrix base, Matrix vec, double horiz_tol = 1e-8);

  const UnitRowMatrix& base() const noexcept { return tangent_.base(); }
  const Matrix& vec() const noexcept { return tangent_.vec(); }
  const ProductTangent& tangent() const noexcept { return tangent_; }

private:
  ProductTangent tangent_;
};

/// ||V^T X - X^T V||_F.
double horizontality_residual(const UnitRowMatrix& x, const Matrix& v);

/// Throws SingularSylvester unless X has numerical rank k.
void require_full_rank(const UnitRowMatrix& x, const RankTolerance& tol = {});

/// The skew k x k matrix A with P^v_X(W) = X A, i.e. the solution of
/// (X^T X) A + A (X^T X) = X^T W - W^T X.
Matrix vertical_generator(const UnitRowMatrix& x, const ProductTangent& w,
                          const RankTolerance& tol = {});

ProductTangent vertical_project(const UnitRowMatrix& x, const ProductTangent& w,
                                const RankTolerance& tol = {});
HorizontalTangent horizontal_project(const UnitRowMatrix& x, const ProductTangent& w,
                                     const RankTolerance& tol = {});

/// Quotient metric through horizontal lifts; equal to ps_metric of the lifts.
double quotient_metric(const UnitRowMatrix& x, const HorizontalTangent& u,
                       const HorizontalTangent& v);

/// Horizontal lift of the quotient gradient of an O(k)-invariant function,
/// from its ambient Euclidean gradient at X.
HorizontalTangent lift_gradient(const UnitRowMatrix& x, const Matrix& euclidean_grad,
                                const RankTolerance& tol = {});

} // namespace corrgeo
