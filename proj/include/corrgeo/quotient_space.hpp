#pragma once

#include <optional>
#include <vector>

#include "corrgeo/orthogonal_matrix.hpp"
#include "corrgeo/product_sphere.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// A point [X] = {X O : O in O(k)} of the orbit space, held through one
/// representative.
struct OrbitPoint {
  UnitRowMatrix rep;

  Eigen::Index m() const noexcept { return rep.m(); }
  Eigen::Index k() const noexcept { return rep.k(); }
};

/// Outcome of minimizing l_{X,Y}(O) = sum_i angle((X O)_i, Y_i)^2 over O(k).
/// `aligned` is the Y-side representative Y O^T, so that
/// ps_dist(X, aligned)^2 == loss.
struct AlignmentResult {
  OrthogonalMatrix rotation;
  UnitRowMatrix aligned;
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;
  int restarts_used = 0;
};

// The alignment objective and its Riemannian gradient on O(k).
double alignment_loss(const UnitRowMatrix& x, const UnitRowMatrix& y, const OrthogonalMatrix& o);
Matrix alignment_euclidean_gradient(const UnitRowMatrix& x, const UnitRowMatrix& y,
                                    const OrthogonalMatrix& o);
Matrix alignment_gradient(const UnitRowMatrix& x, const UnitRowMatrix& y,
                          const OrthogonalMatrix& o);

/// Gradient descent on O(k) from one starting rotation.
AlignmentResult align_from(const UnitRowMatrix& x, const UnitRowMatrix& y,
                           const OrthogonalMatrix& start, const SolverConfig& cfg);

/// Multistart alignment: the Procrustes start, the optional warm start and
/// cfg.restarts - 1 seeded random rotations; the lowest loss wins.
AlignmentResult align(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg,
                      const std::optional<OrthogonalMatrix>& warm_start = std::nullopt);

/// Orbit distance sqrt(min_O l_{X,Y}(O)); with cfg.symmetrize the smaller of
/// both argument orders.
double orbit_dist(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg);

/// True when the orbit distance is within cfg.equality_tol.
bool same_orbit(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg);

struct OrbitLog {
  ProductTangent velocity;
  AlignmentResult alignment;
  /// ||V^T X - X^T V||_F; zero exactly when V is horizontal.
  double vertical_residual = 0.0;
  bool horizontal = false;
};

/// Logarithm through alignment: V = ps_log(X, Y O*^T).
/// Throws AntipodalLogarithm, or AlignmentStagnation when the line search
/// stalls far from a critical point.
OrbitLog orbit_log(const OrbitPoint& x, const OrbitPoint& y, const SolverConfig& cfg);

/// [ps_exp(X, V, t)]. With cfg.require_horizontal, a non-horizontal V is
/// rejected with InvalidInput.
OrbitPoint orbit_exp(const OrbitPoint& x, const ProductTangent& v, double t,
                     const SolverConfig& cfg = {});

struct GeodesicSegment {
  UnitRowMatrix start;
  ProductTangent velocity;
  double duration = 1.0;

  UnitRowMatrix at(double t) const;
};

/// Segment t -> [ps_exp(X, orbit_log(X, Y), t)], t in [0, 1].
GeodesicSegment minimizing_geodesic(const OrbitPoint& x, const OrbitPoint& y,
                                    const SolverConfig& cfg);

struct RankSample {
  double t = 0.0;
  int rank = 0;
  bool endpoint = false;
};

/// Ranks at both endpoints and at `samples` equally spaced interior times.
std::vector<RankSample> geodesic_rank_profile(const GeodesicSegment& seg, int samples,
                                              const RankTolerance& tol = {});

struct TimeInterval {
  double t_min = 0.0;
  double t_max = 0.0;
};

/// Largest interval around 0 inside [-t_max_search, t_max_search] on which
/// ps_exp(X, V, t) keeps rank k. Requires X of full rank k.
TimeInterval max_full_rank_interval(const OrbitPoint& x, const ProductTangent& v,
                                    double t_max_search, const RankTolerance& tol = {});

/// Appends k2 - k zero columns.
OrbitPoint k_embedding(const OrbitPoint& x, Eigen::Index k2);

} // namespace corrgeo
