#include "corrgeo/matrix_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "corrgeo/errors.hpp"

namespace corrgeo {

double RankTolerance::threshold(double sigma_max) const {
  return std::max(absolute_floor, relative_factor * sigma_max);
}

OrthogonalMatrix::OrthogonalMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
    fail(ErrorKind::InvalidInput, "orthogonal matrix must be square and non-empty");
  if (!(orthogonality_error(entries_) < kTolerance))
    fail(ErrorKind::InvalidInput, "matrix is not orthogonal");
}

OrthogonalMatrix OrthogonalMatrix::identity(Eigen::Index k) {
  return OrthogonalMatrix(Matrix::Identity(k, k), Unchecked{});
}

OrthogonalMatrix OrthogonalMatrix::transpose() const {
  return OrthogonalMatrix(entries_.transpose(), Unchecked{});
}

double OrthogonalMatrix::orthogonality_error(const Matrix& entries) {
  const auto k = entries.cols();
  return (entries.transpose() * entries - Matrix::Identity(k, k)).norm();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }

SymEig sym_eig(const Matrix& e) {
  if (e.rows() != e.cols())
    fail(ErrorKind::InvalidInput, "sym_eig expects a square matrix");
  if (!e.allFinite())
    fail(ErrorKind::InvalidInput, "sym_eig input has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym(e));
  if (solver.info() != Eigen::Success)
    fail(ErrorKind::InvalidInput, "symmetric eigensolver did not converge");
  // Eigen sorts ascending.
  SymEig out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

OrthogonalMatrix qf(const Matrix& a, const RankTolerance& tol) {
  if (a.rows() != a.cols() || a.rows() == 0)
    fail(ErrorKind::InvalidInput, "qf expects a square non-empty matrix");
  if (!a.allFinite())
    fail(ErrorKind::RetractionFailure, "qf input has non-finite entries");
  const auto k = a.rows();
  if (numerical_rank(a, tol) < k)
    fail(ErrorKind::RetractionFailure, "qf input is numerically singular");

  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return OrthogonalMatrix(std::move(q));
}

OrthogonalMatrix procrustes(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    fail(ErrorKind::InvalidInput, "procrustes inputs must share a shape");
  if (!x.allFinite() || !y.allFinite())
    fail(ErrorKind::InvalidInput, "procrustes input has non-finite entries");
  const Matrix cross = x.transpose() * y;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return OrthogonalMatrix(svd.matrixU() * svd.matrixV().transpose());
}

Matrix sylvester_spd(const Matrix& e, const Matrix& w, const RankTolerance& tol) {
  if (e.rows() != e.cols() || w.rows() != e.rows() || w.cols() != e.cols())
    fail(ErrorKind::InvalidInput, "sylvester_spd shape mismatch");
  const SymEig eig = sym_eig(e);
  const auto k = e.rows();
  if (k == 0) return Matrix(0, 0);
  const double lambda_max = eig.eigenvalues(0);
  const double lambda_min = eig.eigenvalues(k - 1);
  if (!(lambda_max > 0.0) || lambda_min <= tol.threshold(lambda_max))
    fail(ErrorKind::SingularSylvester, "Sylvester operator matrix is not SPD");

  const Matrix& q = eig.eigenvectors;
  Matrix rotated = q.transpose() * w * q;
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      rotated(i, j) /= eig.eigenvalues(i) + eig.eigenvalues(j);
  return q * rotated * q.transpose();
}

std::pair<double, double> singular_value_range(const Matrix& a) {
  if (a.size() == 0) return {0.0, 0.0};
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

int numerical_rank(const Matrix& a, const RankTolerance& tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  const double cut = tol.threshold(s(0));
  return static_cast<int>((s.array() > cut).count());
}

} // namespace corrgeo
