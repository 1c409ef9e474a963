#pragma once

#include <functional>
#include <random>

#include "corrgeo/orthogonal_matrix.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// A k x k skew-symmetric matrix.
class SkewMatrix {
public:
  explicit SkewMatrix(Matrix entries);
  const Matrix& matrix() const noexcept { return entries_; }

private:
  Matrix entries_;
};

/// Tangent projection O skew(O^T V) onto T_O O(k).
Matrix og_project(const OrthogonalMatrix& o, const Matrix& v);

/// QR retraction qf(O + xi). Throws RetractionFailure when O + xi is
/// numerically singular.
OrthogonalMatrix og_retract(const OrthogonalMatrix& o, const Matrix& xi);

using OrthogonalLoss = std::function<double(const OrthogonalMatrix&)>;

struct ArmijoStep {
  double step = 0.0;
  OrthogonalMatrix next;
  double loss = 0.0;
  bool stagnated = false;
};

/// Backtracking line search along the retraction curve t -> qf(O + t xi),
/// accepting the first step with loss <= loss(O) - c1 * step * ||xi||^2.
/// After max_backtracks rejections returns step 0, O and stagnated = true.
/// `current_loss` must equal loss(O). Throws InvalidInput on a non-finite
/// loss value at O.
ArmijoStep og_armijo(const OrthogonalLoss& loss, const OrthogonalMatrix& o,
                     double current_loss, const Matrix& xi, const ArmijoConfig& cfg);

/// Haar-distributed orthogonal matrix: qf of a standard Gaussian matrix.
OrthogonalMatrix random_orthogonal(Eigen::Index k, std::mt19937_64& rng);

} // namespace corrgeo
