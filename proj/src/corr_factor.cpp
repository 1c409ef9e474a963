#include "corrgeo/corr_factor.hpp"

#include <algorithm>
#include <cmath>

#include "corrgeo/errors.hpp"
#include "corrgeo/matrix_kernels.hpp"

namespace corrgeo {

std::string to_string(ViolationKind kind) {
  switch (kind) {
  case ViolationKind::NotSquare: return "NotSquare";
  case ViolationKind::NonFinite: return "NonFinite";
  case ViolationKind::Symmetry: return "SymmetryViolation";
  case ViolationKind::UnitDiagonal: return "UnitDiagonalViolation";
  case ViolationKind::PSD: return "PSDViolation";
  case ViolationKind::EntryRange: return "EntryRangeViolation";
  }
  return "Unknown";
}

std::variant<CorrelationMatrix, std::vector<Violation>> validate(
    const Matrix& z, const CorrelationTolerance& tol) {
  std::vector<Violation> found;
  if (z.rows() != z.cols() || z.rows() == 0) {
    found.push_back({ViolationKind::NotSquare, 0.0});
    return found;
  }
  if (!z.allFinite()) {
    found.push_back({ViolationKind::NonFinite, 0.0});
    return found;
  }
  const double asym = (z - z.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.symmetry) found.push_back({ViolationKind::Symmetry, asym});

  const double diag = (z.diagonal().array() - 1.0).abs().maxCoeff();
  if (diag > tol.unit_diagonal) found.push_back({ViolationKind::UnitDiagonal, diag});

  const double lambda_min = sym_eig(z).eigenvalues.minCoeff();
  if (lambda_min < -tol.psd) found.push_back({ViolationKind::PSD, -lambda_min});

  const double range = z.cwiseAbs().maxCoeff() - 1.0;
  if (range > tol.entry_range) found.push_back({ViolationKind::EntryRange, range});

  if (!found.empty()) return found;
  Matrix clean = sym(z);
  clean.diagonal().setOnes();
  return CorrelationMatrix(std::move(clean), CorrelationMatrix::Trusted{});
}

CorrelationMatrix::CorrelationMatrix(Matrix entries, const CorrelationTolerance& tol) {
  auto checked = validate(entries, tol);
  if (auto* bad = std::get_if<std::vector<Violation>>(&checked)) {
    const Violation& v = bad->front();
    fail(ErrorKind::InvalidCorrelation,
         to_string(v.kind) + " (" + std::to_string(v.magnitude) + ")");
  }
  entries_ = std::get<CorrelationMatrix>(std::move(checked)).entries_;
}

int CorrelationMatrix::detected_rank(const RankTolerance& tol) const {
  return numerical_rank(entries_, tol);
}

CorrelationMatrix gram(const UnitRowMatrix& x) {
  return CorrelationMatrix(x.matrix() * x.matrix().transpose());
}

UnitRowMatrix factorize(const CorrelationMatrix& z, Eigen::Index k, const RankTolerance& tol) {
  if (k < 2) fail(ErrorKind::InvalidInput, "k must be at least 2");
  const SymEig eig = sym_eig(z.matrix());
  const double lambda_max = eig.eigenvalues(0);
  const double cut = tol.threshold(lambda_max);
  const auto rank = static_cast<Eigen::Index>((eig.eigenvalues.array() > cut).count());
  if (rank > k)
    fail(ErrorKind::RankExceedsK, "correlation matrix rank " + std::to_string(rank) +
                                      " exceeds k = " + std::to_string(k));

  Matrix x = Matrix::Zero(z.m(), k);
  for (Eigen::Index j = 0; j < rank; ++j) {
    Vector u = eig.eigenvectors.col(j);
    // Deterministic sign: largest-magnitude entry positive.
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0.0) u = -u;
    x.col(j) = u * std::sqrt(std::max(0.0, eig.eigenvalues(j)));
  }
  return UnitRowMatrix::normalize_rows(x);
}

} // namespace corrgeo
