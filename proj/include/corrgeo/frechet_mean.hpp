#pragma once

#include <vector>

#include "corrgeo/orthogonal_matrix.hpp"
#include "corrgeo/quotient_space.hpp"
#include "corrgeo/types.hpp"

namespace corrgeo {

/// Orbit points of a common shape with strictly positive weights.
class WeightedSampleSet {
public:
  /// Throws InvalidInput (with the sample index when one is at fault) on an
  /// empty set, mismatched lengths or shapes, or a non-positive weight.
  WeightedSampleSet(std::vector<OrbitPoint> points, std::vector<double> weights);

  /// Unit weights.
  explicit WeightedSampleSet(std::vector<OrbitPoint> points);

  const std::vector<OrbitPoint>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return points_.size(); }

private:
  std::vector<OrbitPoint> points_;
  std::vector<double> weights_;
};

struct MeanReport {
  OrbitPoint mean;
  /// L^mean(X_s, {O^i_s}) for s = 0, 1, ...; non-increasing.
  std::vector<double> loss_history;
  /// Final per-sample rotations O^i, registering X^i O^i against the mean.
  std::vector<OrthogonalMatrix> rotations;
  int outer_iterations = 0;
  /// Loss stationarity, not a certificate of a global minimum.
  bool converged = false;
};

/// Weighted Fréchet mean by alternating between per-sample alignments and
/// the fixed-rotation product-sphere mean.
MeanReport frechet_mean(const WeightedSampleSet& samples, const SolverConfig& cfg);

/// sum_i w_i d^2([X^i], candidate).
double frechet_variance(const WeightedSampleSet& samples, const OrbitPoint& candidate,
                        const SolverConfig& cfg);

} // namespace corrgeo
