#pragma once

#include "corrgeo/types.hpp"

namespace corrgeo {

/// A k x k matrix with orthonormal columns, the group element acting on
/// factor matrices by right multiplication.
class OrthogonalMatrix {
public:
  static constexpr double kTolerance = 1e-10;

  /// Throws InvalidInput when ||O^T O - I||_F >= kTolerance.
  explicit OrthogonalMatrix(Matrix entries);

  static OrthogonalMatrix identity(Eigen::Index k);

  const Matrix& matrix() const noexcept { return entries_; }
  Eigen::Index k() const noexcept { return entries_.rows(); }
  OrthogonalMatrix transpose() const;

  /// ||O^T O - I||_F.
  static double orthogonality_error(const Matrix& entries);

private:
  struct Unchecked {};
  OrthogonalMatrix(Matrix entries, Unchecked) : entries_(std::move(entries)) {}

  Matrix entries_;
};

} // namespace corrgeo
