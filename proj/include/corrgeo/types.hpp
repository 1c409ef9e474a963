#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace corrgeo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Threshold for deciding which singular values count toward the rank:
/// max(absolute_floor, relative_factor * sigma_max).
struct RankTolerance {
  double absolute_floor = 1e-12;
  double relative_factor = 1e-8;

  double threshold(double sigma_max) const;
};

/// Armijo backtracking constants shared by the O(k) and sphere solvers.
struct ArmijoConfig {
  double initial_step = 1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
};

/// Every tolerance, cap and seed used by the iterative solvers.
struct SolverConfig {
  // Gradient descent on O(k) (alignment) and on the sphere (row means).
  double grad_tol = 1e-8;
  int max_iterations = 500;
  ArmijoConfig armijo{};
  // A line search that cannot make progress while the gradient is already
  // below this norm has hit the floating-point floor and counts as converged.
  double stall_grad_tol = 1e-6;

  // Alignment multistart: the Procrustes start plus restarts - 1 random ones.
  int restarts = 5;
  std::uint64_t seed = 0;
  bool symmetrize = true;

  // Fréchet mean outer loop.
  double mean_tol = 1e-10;
  int max_outer = 200;

  double horiz_tol = 1e-8;
  bool require_horizontal = false;
  double equality_tol = 1e-8;
  double antipodal_guard = 1e-6;
  RankTolerance rank{};
};

/// Diagnostics of one gradient-descent run.
struct SolverReport {
  double loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool stagnated = false;
};

} // namespace corrgeo
