#pragma once

#include <string>
#include <variant>
#include <vector>

#include "corrgeo/product_sphere.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// Tolerances for accepting a matrix as a correlation matrix.
struct CorrelationTolerance {
  double symmetry = 1e-10;
  double unit_diagonal = 1e-10;
  double psd = 1e-8;         // smallest eigenvalue may go down to -psd
  double entry_range = 1e-10;
};

enum class ViolationKind {
  NotSquare,
  NonFinite,
  Symmetry,
  UnitDiagonal,
  PSD,
  EntryRange,
};

std::string to_string(ViolationKind kind);

/// One failed check with the size of the failure (e.g. the largest
/// diagonal deviation, or minus the smallest eigenvalue).
struct Violation {
  ViolationKind kind;
  double magnitude = 0.0;
};

/// Symmetric PSD m x m matrix with unit diagonal. Construct through
/// validate() or from_factor(); the raw constructor validates and throws
/// InvalidCorrelation naming the first violated invariant.
class CorrelationMatrix {
public:
  explicit CorrelationMatrix(Matrix entries, const CorrelationTolerance& tol = {});

  const Matrix& matrix() const noexcept { return entries_; }
  Eigen::Index m() const noexcept { return entries_.rows(); }

  /// Numerical rank, computed on demand.
  int detected_rank(const RankTolerance& tol = {}) const;

private:
  struct Trusted {};
  CorrelationMatrix(Matrix entries, Trusted) : entries_(std::move(entries)) {}
  friend std::variant<CorrelationMatrix, std::vector<Violation>> validate(
      const Matrix& z, const CorrelationTolerance& tol);

  Matrix entries_;
};

/// All violated invariants, or the validated matrix (symmetrized, with the
/// diagonal set to exactly one).
std::variant<CorrelationMatrix, std::vector<Violation>> validate(
    const Matrix& z, const CorrelationTolerance& tol = {});

/// Gram matrix X X^T, an orbit invariant.
CorrelationMatrix gram(const UnitRowMatrix& x);

/// A factor X with X X^T = Z, built from the top eigenpairs of Z and
/// zero-padded to k columns. Throws RankExceedsK when the numerical rank of
/// Z exceeds k.
UnitRowMatrix factorize(const CorrelationMatrix& z, Eigen::Index k,
                        const RankTolerance& tol = {});

} // namespace corrgeo
