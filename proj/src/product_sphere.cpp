#include "corrgeo/product_sphere.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "corrgeo/armijo.hpp"
#include "corrgeo/errors.hpp"
#include "corrgeo/sphere.hpp"

namespace corrgeo {

namespace {

constexpr double kFactorClamp = 1e8;

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    fail(ErrorKind::InvalidInput, std::string(what) + ": shape mismatch");
}

void require_weights(std::span<const double> weights, std::size_t n) {
  if (weights.size() != n) fail(ErrorKind::InvalidInput, "weight count does not match points");
  for (std::size_t i = 0; i < n; ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      fail(ErrorKind::InvalidInput, "weights must be positive and finite", i);
}

} // namespace

UnitRowMatrix::UnitRowMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1) fail(ErrorKind::InvalidInput, "factor matrix needs at least one row");
  if (entries_.cols() < 2) fail(ErrorKind::InvalidInput, "factor matrix needs k >= 2 columns");
  if (!entries_.allFinite()) fail(ErrorKind::InvalidInput, "factor matrix has non-finite entries");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    const double n = entries_.row(i).norm();
    if (std::abs(n - 1.0) > kUnitTolerance)
      fail(ErrorKind::InvalidInput, "row is not unit norm", static_cast<std::size_t>(i));
    entries_.row(i) /= n;
  }
}

UnitRowMatrix UnitRowMatrix::normalize_rows(const Matrix& entries) {
  Matrix out = entries;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double n = out.row(i).norm();
    if (!(n > 0.0) || !std::isfinite(n))
      fail(ErrorKind::InvalidInput, "cannot normalize a zero row", static_cast<std::size_t>(i));
    out.row(i) /= n;
  }
  return UnitRowMatrix(std::move(out));
}

UnitRowMatrix UnitRowMatrix::rotated(const OrthogonalMatrix& o) const {
  if (o.k() != k()) fail(ErrorKind::InvalidInput, "rotation size does not match k");
  return UnitRowMatrix(entries_ * o.matrix());
}

ProductTangent::ProductTangent(UnitRowMatrix base, Matrix vec)
    : base_(std::move(base)), vec_(std::move(vec)) {
  require_same_shape(base_.matrix(), vec_, "ProductTangent");
  if (!vec_.allFinite()) fail(ErrorKind::InvalidInput, "tangent has non-finite entries");
  for (Eigen::Index i = 0; i < vec_.rows(); ++i) {
    const double inner = base_.matrix().row(i).dot(vec_.row(i));
    if (std::abs(inner) > kTangentTolerance * std::max(1.0, vec_.row(i).norm()))
      fail(ErrorKind::InvalidInput, "row is not tangent to its sphere",
           static_cast<std::size_t>(i));
  }
}

double ps_dist(const UnitRowMatrix& x, const UnitRowMatrix& y) {
  require_same_shape(x.matrix(), y.matrix(), "ps_dist");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < x.m(); ++i) {
    const double a = unit_angle(x.matrix().row(i).transpose(), y.matrix().row(i).transpose());
    sum += a * a;
  }
  return std::sqrt(sum);
}

double ps_metric(const ProductTangent& v, const ProductTangent& w) {
  if (v.base().matrix() != w.base().matrix())
    fail(ErrorKind::InvalidInput, "ps_metric needs tangents at the same base");
  return (v.vec().transpose() * w.vec()).trace();
}

UnitRowMatrix ps_exp(const UnitRowMatrix& x, const ProductTangent& v, double t) {
  require_same_shape(x.matrix(), v.vec(), "ps_exp");
  Matrix out(x.m(), x.k());
  for (Eigen::Index i = 0; i < x.m(); ++i)
    out.row(i) = detail::exp_unit(x.matrix().row(i).transpose(), t * v.vec().row(i).transpose())
                     .transpose();
  return UnitRowMatrix(std::move(out));
}

ProductTangent ps_log(const UnitRowMatrix& x, const UnitRowMatrix& y, double antipodal_guard) {
  require_same_shape(x.matrix(), y.matrix(), "ps_log");
  Matrix out(x.m(), x.k());
  for (Eigen::Index i = 0; i < x.m(); ++i) {
    const Vector xi = x.matrix().row(i).transpose();
    const Vector yi = y.matrix().row(i).transpose();
    if (unit_angle(xi, yi) > std::numbers::pi - antipodal_guard)
      fail(ErrorKind::AntipodalLogarithm, "antipodal row pair", static_cast<std::size_t>(i));
    out.row(i) = detail::log_unit(xi, yi).transpose();
  }
  return ProductTangent(x, std::move(out));
}

ProductTangent ps_project(const UnitRowMatrix& x, const Matrix& w) {
  require_same_shape(x.matrix(), w, "ps_project");
  const Matrix& b = x.matrix();
  Matrix out = w;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector inner = (b.array() * out.array()).rowwise().sum();
    out -= inner.asDiagonal() * b;
  }
  return ProductTangent(x, std::move(out));
}

double row_mean_loss(const Matrix& points, std::span<const double> weights, const Vector& x) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double a = unit_angle(points.row(i).transpose(), x);
    sum += weights[static_cast<std::size_t>(i)] * a * a;
  }
  return sum;
}

RowMeanGradient row_mean_gradient(const Matrix& points, std::span<const double> weights,
                                  const Vector& x) {
  RowMeanGradient out;
  Vector euclidean = Vector::Zero(x.size());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector p = points.row(i).transpose();
    const double c = std::clamp(p.dot(x), -1.0, 1.0);
    const double s = (p - c * x).norm();
    // arccos(c) / sqrt(1 - c^2): limit 1 as c -> 1, divergent as c -> -1.
    double factor = 1.0;
    if (1.0 - c >= 1e-12) {
      const double theta = std::atan2(s, c);
      if (theta >= kFactorClamp * s) {
        factor = kFactorClamp;
        out.clamped = true;
      } else {
        factor = theta / s;
      }
    }
    euclidean -= 2.0 * weights[static_cast<std::size_t>(i)] * factor * p;
  }
  out.riemannian = euclidean - x.dot(euclidean) * x;
  return out;
}

Vector row_mean_initial_point(const Matrix& points, std::span<const double> weights) {
  Vector mean = Vector::Zero(points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    mean += weights[static_cast<std::size_t>(i)] * points.row(i).transpose();
  const double n = mean.norm();
  if (n < 1e-8) return points.row(0).transpose();
  return mean / n;
}

RowMeanResult sphere_weighted_mean(const Matrix& points, std::span<const double> weights,
                                   const Vector& start, const SolverConfig& cfg) {
  if (points.rows() == 0) fail(ErrorKind::InvalidInput, "empty point cloud");
  require_weights(weights, static_cast<std::size_t>(points.rows()));
  if (start.size() != points.cols()) fail(ErrorKind::InvalidInput, "start dimension mismatch");

  RowMeanResult out;
  out.point = start / start.norm();
  double loss = row_mean_loss(points, weights, out.point);
  const ArmijoConfig& ls = cfg.armijo;

  for (int it = 0;; ++it) {
    const RowMeanGradient g = row_mean_gradient(points, weights, out.point);
    out.clamped = out.clamped || g.clamped;
    const double gnorm = g.riemannian.norm();
    out.report.grad_norm = gnorm;
    out.report.iterations = it;
    if (gnorm <= cfg.grad_tol) {
      out.report.converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;

    const Vector direction = -g.riemannian;
    double step = ls.initial_step;
    bool accepted = false;
    for (int b = 0; b <= ls.max_backtracks; ++b) {
      const Vector trial_raw = out.point + step * direction;
      const double n = trial_raw.norm();
      double trial_loss = std::numeric_limits<double>::infinity();
      if (n > 0.0) {
        const Vector trial = trial_raw / n;
        trial_loss = row_mean_loss(points, weights, trial);
        if (trial_loss < loss &&
            trial_loss <= loss - ls.sufficient_decrease * step * gnorm * gnorm) {
          out.point = trial;
          loss = trial_loss;
          accepted = true;
          break;
        }
      }
      step = armijo_next_step(step, loss, -gnorm * gnorm, trial_loss, ls);
    }
    if (!accepted) {
      out.report.stagnated = true;
      out.report.converged = gnorm <= cfg.stall_grad_tol;
      break;
    }
  }
  out.report.loss = loss;
  return out;
}

FixedMeanResult ps_frechet_fixed(const std::vector<UnitRowMatrix>& points,
                                 std::span<const double> weights, const SolverConfig& cfg,
                                 const std::optional<UnitRowMatrix>& init) {
  if (points.empty()) fail(ErrorKind::InvalidInput, "ps_frechet_fixed needs at least one point");
  require_weights(weights, points.size());
  const Eigen::Index m = points.front().m();
  const Eigen::Index k = points.front().k();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i].m() != m || points[i].k() != k)
      fail(ErrorKind::InvalidInput, "points must share a shape", i);
  if (init && (init->m() != m || init->k() != k))
    fail(ErrorKind::InvalidInput, "initial point shape mismatch");

  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix mean(m, k);
  std::vector<SolverReport> reports;
  reports.reserve(static_cast<std::size_t>(m));
  FixedMeanResult partial{UnitRowMatrix(Matrix::Identity(1, 2)), {}, {}, true, 0.0};

  for (Eigen::Index j = 0; j < m; ++j) {
    Matrix cloud(n, k);
    for (Eigen::Index i = 0; i < n; ++i)
      cloud.row(i) = points[static_cast<std::size_t>(i)].matrix().row(j);
    const Vector start = init ? Vector(init->matrix().row(j).transpose())
                              : row_mean_initial_point(cloud, weights);
    RowMeanResult r = sphere_weighted_mean(cloud, weights, start, cfg);
    mean.row(j) = r.point.transpose();
    if (r.clamped) partial.clamped_rows.push_back(static_cast<std::size_t>(j));
    partial.converged = partial.converged && r.report.converged;
    partial.loss += r.report.loss;
    reports.push_back(r.report);
  }
  partial.mean = UnitRowMatrix(std::move(mean));
  partial.rows = std::move(reports);
  return partial;
}

} // namespace corrgeo
