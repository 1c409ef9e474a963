#pragma once

#include <optional>
#include <span>
#include <vector>

#include "corrgeo/orthogonal_matrix.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// An m x k matrix with unit-norm rows: a point of the product of m spheres
/// S^{k-1}, and a representative of its O(k) orbit.
class UnitRowMatrix {
public:
  static constexpr double kUnitTolerance = 1e-10;

  /// Requires k >= 2, m >= 1 and rows within kUnitTolerance of unit norm;
  /// rows are renormalized on construction.
  explicit UnitRowMatrix(Matrix entries);

  /// Normalizes every row of an arbitrary matrix with non-zero rows.
  static UnitRowMatrix normalize_rows(const Matrix& entries);

  const Matrix& matrix() const noexcept { return entries_; }
  Eigen::Index m() const noexcept { return entries_.rows(); }
  Eigen::Index k() const noexcept { return entries_.cols(); }

  /// X O, again a point of the product manifold.
  UnitRowMatrix rotated(const OrthogonalMatrix& o) const;

private:
  Matrix entries_;
};

/// A tangent vector at base: every row of vec is orthogonal to the matching
/// row of base.
class ProductTangent {
public:
  static constexpr double kTangentTolerance = 1e-10;

  ProductTangent(UnitRowMatrix base, Matrix vec);

  const UnitRowMatrix& base() const noexcept { return base_; }
  const Matrix& vec() const noexcept { return vec_; }
  double norm() const { return vec_.norm(); }

private:
  UnitRowMatrix base_;
  Matrix vec_;
};

/// sqrt(sum_i angle(X_i, Y_i)^2).
double ps_dist(const UnitRowMatrix& x, const UnitRowMatrix& y);

/// trace(V^T W) for tangents at the same base.
double ps_metric(const ProductTangent& v, const ProductTangent& w);

/// Row-wise sphere exponential of t V.
UnitRowMatrix ps_exp(const UnitRowMatrix& x, const ProductTangent& v, double t = 1.0);

/// Row-wise sphere logarithm. Throws AntipodalLogarithm with the row index
/// when some row pair is within antipodal_guard of antipodal.
ProductTangent ps_log(const UnitRowMatrix& x, const UnitRowMatrix& y,
                      double antipodal_guard = 1e-6);

/// Removes the normal component of every row of W.
ProductTangent ps_project(const UnitRowMatrix& x, const Matrix& w);

// Per-row weighted Fréchet problem on S^{k-1}: minimize
// sum_i w_i angle(p_i, x)^2 where the p_i are the rows of `points`.

struct RowMeanGradient {
  Vector riemannian;
  bool clamped = false;  // some point was near-antipodal to x
};

double row_mean_loss(const Matrix& points, std::span<const double> weights, const Vector& x);
RowMeanGradient row_mean_gradient(const Matrix& points, std::span<const double> weights,
                                  const Vector& x);

struct RowMeanResult {
  Vector point;
  SolverReport report;
  bool clamped = false;
};

/// Riemannian gradient descent with Armijo backtracking and the
/// normalization retraction, started at `start`.
RowMeanResult sphere_weighted_mean(const Matrix& points, std::span<const double> weights,
                                   const Vector& start, const SolverConfig& cfg);

/// Default start: normalized weighted Euclidean mean, or the first point
/// when that mean nearly vanishes.
Vector row_mean_initial_point(const Matrix& points, std::span<const double> weights);

struct FixedMeanResult {
  UnitRowMatrix mean;
  std::vector<SolverReport> rows;
  std::vector<std::size_t> clamped_rows;
  bool converged = true;
  double loss = 0.0;
};

/// Weighted Fréchet mean on the product of spheres with the sample
/// rotations already applied: independent per-row sphere means.
/// When `init` is given it seeds every row; otherwise the default start is
/// used.
FixedMeanResult ps_frechet_fixed(const std::vector<UnitRowMatrix>& points,
                                 std::span<const double> weights, const SolverConfig& cfg,
                                 const std::optional<UnitRowMatrix>& init = std::nullopt);

} // namespace corrgeo
