#pragma once

#include "corrgeo/orthogonal_matrix.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
struct SymEig {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Eigendecomposition of (E + E^T) / 2. Throws InvalidInput on non-finite
/// entries or a non-square input.
SymEig sym_eig(const Matrix& e);

/// Orthogonal factor of the QR decomposition of a square matrix, with the
/// sign convention that R has a positive diagonal. Throws RetractionFailure
/// when A is numerically singular.
OrthogonalMatrix qf(const Matrix& a, const RankTolerance& tol = {});

/// argmin over O in O(k) of ||X O - Y||_F^2, from the k x k SVD of X^T Y.
OrthogonalMatrix procrustes(const Matrix& x, const Matrix& y);

/// Solves E A + A E = W for SPD E in the eigenbasis of E. Skew W yields a
/// skew A. Throws SingularSylvester when E is not numerically SPD.
Matrix sylvester_spd(const Matrix& e, const Matrix& w,
                     const RankTolerance& tol = {});

/// Number of singular values above tol.threshold(sigma_max).
int numerical_rank(const Matrix& a, const RankTolerance& tol = {});

/// Smallest and largest singular value of a.
std::pair<double, double> singular_value_range(const Matrix& a);

inline Matrix skew(const Matrix& w) { return 0.5 * (w - w.transpose()); }
inline Matrix sym(const Matrix& w) { return 0.5 * (w + w.transpose()); }

bool all_finite(const Matrix& a);

} // namespace corrgeo
