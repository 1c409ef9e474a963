#include "corrgeo/orthogonal_group.hpp"

#include <cmath>
#include <limits>

#include "corrgeo/armijo.hpp"
#include "corrgeo/errors.hpp"
#include "corrgeo/matrix_kernels.hpp"

namespace corrgeo {

SkewMatrix::SkewMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols())
    fail(ErrorKind::InvalidInput, "skew matrix must be square");
  if ((entries_ + entries_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorKind::InvalidInput, "matrix is not skew-symmetric");
}

Matrix og_project(const OrthogonalMatrix& o, const Matrix& v) {
  if (v.rows() != o.k() || v.cols() != o.k())
    fail(ErrorKind::InvalidInput, "og_project shape mismatch");
  return o.matrix() * skew(o.matrix().transpose() * v);
}

OrthogonalMatrix og_retract(const OrthogonalMatrix& o, const Matrix& xi) {
  if (xi.rows() != o.k() || xi.cols() != o.k())
    fail(ErrorKind::InvalidInput, "og_retract shape mismatch");
  if (xi.isZero(0.0)) return o;
  return qf(o.matrix() + xi);
}

ArmijoStep og_armijo(const OrthogonalLoss& loss, const OrthogonalMatrix& o,
                     double current_loss, const Matrix& xi, const ArmijoConfig& cfg) {
  if (!std::isfinite(current_loss)) fail(ErrorKind::InvalidInput, "loss is not finite");
  const double xi_sq = xi.squaredNorm();
  if (xi_sq == 0.0) return {0.0, o, current_loss, false};

  double step = cfg.initial_step;
  for (int b = 0; b <= cfg.max_backtracks; ++b) {
    double trial_loss = std::numeric_limits<double>::infinity();
    try {
      OrthogonalMatrix trial = og_retract(o, step * xi);
      trial_loss = loss(trial);
      if (std::isfinite(trial_loss) &&
          trial_loss < current_loss &&
          trial_loss <= current_loss - cfg.sufficient_decrease * step * xi_sq)
        return {step, std::move(trial), trial_loss, false};
    } catch (const GeometryError& e) {
      if (e.kind() != ErrorKind::RetractionFailure) throw;
    }
    step = armijo_next_step(step, current_loss, -xi_sq, trial_loss, cfg);
  }
  return {0.0, o, current_loss, true};
}

OrthogonalMatrix random_orthogonal(Eigen::Index k, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (;;) {
    Matrix g(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i) g(i, j) = normal(rng);
    try {
      return qf(g);
    } catch (const GeometryError&) {
      // singular draw; measure zero, redraw
    }
  }
}

} // namespace corrgeo
