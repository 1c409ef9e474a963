#include "corrgeo/quotient_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrgeo/errors.hpp"
#include "corrgeo/fixed_rank_quotient.hpp"
#include "corrgeo/matrix_kernels.hpp"
#include "corrgeo/orthogonal_group.hpp"
#include "corrgeo/sphere.hpp"

namespace corrgeo {

namespace {

constexpr double kFactorClamp = 1e8;
// Below this loss the alignment is exact to rounding; further restarts are skipped.
constexpr double kExactLoss = 1e-24;

void require_same_shape(const UnitRowMatrix& x, const UnitRowMatrix& y) {
  if (x.m() != y.m() || x.k() != y.k())
    fail(ErrorKind::InvalidInput, "orbit points must share (m, k)");
}

} // namespace

double alignment_loss(const UnitRowMatrix& x, const UnitRowMatrix& y,
                      const OrthogonalMatrix& o) {
  require_same_shape(x, y);
  const Matrix xo = x.matrix() * o.matrix();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < xo.rows(); ++i) {
    const double a = unit_angle(xo.row(i).transpose(), y.matrix().row(i).transpose());
    sum += a * a;
  }
  return sum;
}

Matrix alignment_euclidean_gradient(const UnitRowMatrix& x, const UnitRowMatrix& y,
                                    const OrthogonalMatrix& o) {
  require_same_shape(x, y);
  const Matrix xo = x.matrix() * o.matrix();
  // d/dO <(XO)_i, Y_i> = X_i Y_i^T, so the gradient is sum_i h_i X_i Y_i^T
  // with h_i = -2 arccos(c_i) / sqrt(1 - c_i^2).
  Vector h(xo.rows());
  for (Eigen::Index i = 0; i < xo.rows(); ++i) {
    const Vector p = xo.row(i).transpose();
    const Vector q = y.matrix().row(i).transpose();
    const double c = std::clamp(p.dot(q), -1.0, 1.0);
    double factor = 1.0;
    if (1.0 - c >= 1e-12) {
      const double s = (q - c * p).norm();
      const double theta = std::atan2(s, c);
      factor = theta >= kFactorClamp * s ? kFactorClamp : theta / s;
    }
    h(i) = -2.0 * factor;
  }
  return x.matrix().transpose() * h.asDiagonal() * y.matrix();
}

Matrix alignment_gradient(const UnitRowMatrix& x, const UnitRowMatrix& y,
                          const OrthogonalMatrix& o) {
  return og_project(o, alignment_euclidean_gradient(x, y, o));
}

namespace {

// Near a critical point the loss is flat to rounding and the Armijo test
// can no longer see progress. Steps that shrink the gradient norm while the
// loss stays within rounding of its value on entry still sharpen the
// critical point. Returns true once the gradient reaches cfg.grad_tol.
bool polish_critical_point(const UnitRowMatrix& x, const UnitRowMatrix& y, OrthogonalMatrix& o,
                           double& value, double& gnorm, double step, int& it,
                           const SolverConfig& cfg) {
  if (gnorm > cfg.stall_grad_tol) return false;
  Matrix g = alignment_gradient(x, y, o);
  const double ceiling = value + 1e-14 * std::max(1.0, value);
  while (gnorm > cfg.grad_tol && it < cfg.max_iterations) {
    bool accepted = false;
    for (int b = 0; b <= cfg.armijo.max_backtracks && !accepted; ++b, step *= 0.5) {
      OrthogonalMatrix trial = og_retract(o, -step * g);
      const double trial_value = alignment_loss(x, y, trial);
      Matrix trial_g = alignment_gradient(x, y, trial);
      const double trial_norm = trial_g.norm();
      if (trial_norm < gnorm && trial_value <= ceiling) {
        o = std::move(trial);
        value = trial_value;
        g = std::move(trial_g);
        gnorm = trial_norm;
        accepted = true;
      }
    }
    if (!accepted) return false;
    step *= 4.0;  // undo the last halving and try a longer step next
    ++it;
  }
  return gnorm <= cfg.grad_tol;
}

} // namespace

AlignmentResult align_from(const UnitRowMatrix& x, const UnitRowMatrix& y,
                           const OrthogonalMatrix& start, const SolverConfig& cfg) {
  require_same_shape(x, y);
  const OrthogonalLoss loss = [&](const OrthogonalMatrix& o) { return alignment_loss(x, y, o); };

  OrthogonalMatrix o = start;
  double value = loss(o);
  double gnorm = 0.0;
  int it = 0;
  bool converged = false;
  bool stagnated = false;
  // Barzilai-Borwein trial step. Gradients are compared in the Lie algebra
  // (O^T grad), which is how they are transported between iterates.
  ArmijoConfig ls = cfg.armijo;
  Matrix prev_omega;
  double prev_step = 0.0;
  for (;; ++it) {
    const Matrix g = alignment_gradient(x, y, o);
    gnorm = g.norm();
    if (gnorm <= cfg.grad_tol) {
      converged = true;
      break;
    }
    if (it >= cfg.max_iterations) break;
    const Matrix omega = o.matrix().transpose() * g;
    ls.initial_step = cfg.armijo.initial_step;
    if (prev_step > 0.0) {
      const double ss = prev_step * prev_step * prev_omega.squaredNorm();
      const double sy = -prev_step * (prev_omega.array() * (omega - prev_omega).array()).sum();
      if (sy > 0.0) ls.initial_step = std::clamp(ss / sy, 1e-6, 1e6);
    }
    ArmijoStep step = og_armijo(loss, o, value, -g, ls);
    if (step.stagnated) {
      stagnated = !polish_critical_point(x, y, o, value, gnorm, ls.initial_step, it, cfg);
      converged = gnorm <= (stagnated ? cfg.stall_grad_tol : cfg.grad_tol);
      break;
    }
    prev_omega = omega;
    prev_step = step.step;
    o = std::move(step.next);
    value = step.loss;
  }
  UnitRowMatrix aligned = y.rotated(o.transpose());
  return AlignmentResult{std::move(o), std::move(aligned), value, gnorm, it,
                         converged, stagnated, 1};
}

AlignmentResult align(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg,
                      const std::optional<OrthogonalMatrix>& warm_start) {
  require_same_shape(x.rep, y.rep);
  std::mt19937_64 rng(cfg.seed);

  std::optional<AlignmentResult> best;
  int used = 0;
  auto consider = [&](const OrthogonalMatrix& start) {
    AlignmentResult r = align_from(x.rep, y.rep, start, cfg);
    ++used;
    if (!best || r.loss < best->loss) best = std::move(r);
  };

  consider(procrustes(x.rep.matrix(), y.rep.matrix()));
  if (warm_start) {
    if (warm_start->k() != x.k()) fail(ErrorKind::InvalidInput, "warm start has the wrong size");
    consider(*warm_start);
  }
  for (int r = 1; r < cfg.restarts && best->loss > kExactLoss; ++r)
    consider(random_orthogonal(x.k(), rng));

  best->restarts_used = used;
  return std::move(*best);
}

double orbit_dist(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg) {
  double loss = align(x, y, cfg).loss;
  if (cfg.symmetrize && loss > kExactLoss) loss = std::min(loss, align(y, x, cfg).loss);
  return std::sqrt(std::max(0.0, loss));
}

bool same_orbit(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg) {
  return orbit_dist(x, y, cfg) <= cfg.equality_tol;
}

OrbitLog orbit_log(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg) {
  AlignmentResult alignment = align(x, y, cfg);
  // The horizontality residual of the log is of the order of the alignment
  // gradient, so polish the optimum well below horiz_tol.
  SolverConfig tight = cfg;
  tight.grad_tol = std::min(cfg.grad_tol, 1e-2 * cfg.horiz_tol);
  if (alignment.grad_norm > tight.grad_tol) {
    AlignmentResult polished = align_from(x.rep, y.rep, alignment.rotation, tight);
    if (polished.grad_norm < alignment.grad_norm &&
        polished.loss <= alignment.loss + 1e-14 * std::max(1.0, alignment.loss)) {
      polished.restarts_used = alignment.restarts_used;
      polished.iterations += alignment.iterations;
      polished.converged = polished.converged || alignment.converged;
      alignment = std::move(polished);
    }
  }
  if (alignment.stagnated && !alignment.converged)
    fail(ErrorKind::AlignmentStagnation, "alignment line search stalled away from a critical point");
  ProductTangent v = ps_log(x.rep, alignment.aligned, cfg.antipodal_guard);

  const double residual = horizontality_residual(x.rep, v.vec());
  const bool horizontal = residual <= cfg.horiz_tol * std::max(1.0, v.norm());
  return OrbitLog{std::move(v), std::move(alignment), residual, horizontal};
}

OrbitPoint orbit_exp(const OrbitPoint& x, const ProductTangent& v, double t,
                     const SolverConfig& cfg) {
  if (v.base().matrix() != x.rep.matrix())
    fail(ErrorKind::InvalidInput, "tangent is based at a different representative");
  if (cfg.require_horizontal &&
      horizontality_residual(x.rep, v.vec()) > cfg.horiz_tol * std::max(1.0, v.norm()))
    fail(ErrorKind::InvalidInput, "orbit_exp requires a horizontal tangent");
  return OrbitPoint{ps_exp(x.rep, v, t)};
}

UnitRowMatrix GeodesicSegment::at(double t) const { return ps_exp(start, velocity, t); }

GeodesicSegment minimizing_geodesic(const OrbitPoint& x, const OrbitPoint& y,
                                    const SolverConfig& cfg) {
  OrbitLog log = orbit_log(x, y, cfg);
  return GeodesicSegment{x.rep, std::move(log.velocity), 1.0};
}

std::vector<RankSample> geodesic_rank_profile(const GeodesicSegment& seg, int samples,
                                              const RankTolerance& tol) {
  if (samples < 2) fail(ErrorKind::InvalidInput, "rank profile needs at least two samples");
  std::vector<RankSample> out;
  out.reserve(static_cast<std::size_t>(samples) + 2);
  out.push_back({0.0, numerical_rank(seg.start.matrix(), tol), true});
  for (int j = 1; j <= samples; ++j) {
    const double t = seg.duration * j / (samples + 1);
    out.push_back({t, numerical_rank(seg.at(t).matrix(), tol), false});
  }
  out.push_back({seg.duration, numerical_rank(seg.at(seg.duration).matrix(), tol), true});
  return out;
}

namespace {

// First time in (0, limit] at which t -> ps_exp(X, direction * V, t) loses
// rank, or `limit` when none is found. Rank can only drop at isolated
// times, so the scan tracks the smallest singular value and refines every
// local minimum with a golden-section search before testing the rank.
double first_rank_drop(const UnitRowMatrix& x, const ProductTangent& v, double direction,
                       double limit, const RankTolerance& tol) {
  const Eigen::Index k = x.k();
  auto point = [&](double t) { return ps_exp(x, v, direction * t).matrix(); };
  auto sigma_min = [&](double t) { return singular_value_range(point(t)).first; };
  auto full_rank = [&](double t) { return numerical_rank(point(t), tol) == k; };

  const int steps = std::max(4096, static_cast<int>(std::ceil(limit / 1e-3)));
  const double h = limit / steps;
  double prev_t = 0.0;
  double prev = sigma_min(0.0);
  double cur_t = h;
  double cur = sigma_min(cur_t);

  auto bisect = [&](double lo, double hi) {
    // lo is full rank, hi is not.
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      (full_rank(mid) ? lo : hi) = mid;
    }
    return hi;
  };

  for (int j = 1; j <= steps; ++j) {
    if (!full_rank(cur_t)) return bisect(prev_t, cur_t);
    if (j == steps) break;
    const double next_t = std::min(limit, cur_t + h);
    const double next = sigma_min(next_t);
    if (cur < prev && cur <= next) {
      double a = prev_t;
      double b = next_t;
      constexpr double kInvPhi = 0.6180339887498949;
      double c = b - kInvPhi * (b - a);
      double d = a + kInvPhi * (b - a);
      double fc = sigma_min(c);
      double fd = sigma_min(d);
      while (b - a > 1e-13) {
        if (fc < fd) {
          b = d; d = c; fd = fc;
          c = b - kInvPhi * (b - a);
          fc = sigma_min(c);
        } else {
          a = c; c = d; fc = fd;
          d = a + kInvPhi * (b - a);
          fd = sigma_min(d);
        }
      }
      const double t_star = 0.5 * (a + b);
      if (!full_rank(t_star)) return t_star;
    }
    prev_t = cur_t;
    prev = cur;
    cur_t = next_t;
    cur = next;
  }
  return limit;
}

} // namespace

TimeInterval max_full_rank_interval(const OrbitPoint& x, const ProductTangent& v,
                                    double t_max_search, const RankTolerance& tol) {
  if (!(t_max_search > 0.0)) fail(ErrorKind::InvalidInput, "search half-width must be positive");
  if (v.base().matrix() != x.rep.matrix())
    fail(ErrorKind::InvalidInput, "tangent is based at a different representative");
  if (numerical_rank(x.rep.matrix(), tol) < x.k())
    fail(ErrorKind::InvalidInput, "base point is not of full rank k");
  if (v.vec().isZero(0.0)) return {-t_max_search, t_max_search};
  return {-first_rank_drop(x.rep, v, -1.0, t_max_search, tol),
          first_rank_drop(x.rep, v, 1.0, t_max_search, tol)};
}

OrbitPoint k_embedding(const OrbitPoint& x, Eigen::Index k2) {
  if (k2 < x.k()) fail(ErrorKind::InvalidInput, "embedding dimension smaller than k");
  Matrix padded = Matrix::Zero(x.m(), k2);
  padded.leftCols(x.k()) = x.rep.matrix();
  return OrbitPoint{UnitRowMatrix(std::move(padded))};
}

} // namespace corrgeo
