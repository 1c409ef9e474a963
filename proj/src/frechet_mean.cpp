#include "corrgeo/frechet_mean.hpp"

#include <cmath>
#include <limits>

#include "corrgeo/errors.hpp"
#include "corrgeo/matrix_kernels.hpp"
#include "corrgeo/product_sphere.hpp"

namespace corrgeo {

WeightedSampleSet::WeightedSampleSet(std::vector<OrbitPoint> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty()) fail(ErrorKind::InvalidInput, "sample set is empty");
  if (points_.size() != weights_.size())
    fail(ErrorKind::InvalidInput, "sample and weight counts differ");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].m() != points_[0].m() || points_[i].k() != points_[0].k())
      fail(ErrorKind::InvalidInput, "samples must share (m, k)", i);
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      fail(ErrorKind::InvalidInput, "weights must be positive", i);
  }
}

WeightedSampleSet::WeightedSampleSet(std::vector<OrbitPoint> points)
    : WeightedSampleSet(points, std::vector<double>(points.size(), 1.0)) {}

double frechet_variance(const WeightedSampleSet& samples, const OrbitPoint& candidate,
                        const SolverConfig& cfg) {
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = orbit_dist(samples.points()[i], candidate, cfg);
    sum += samples.weights()[i] * d * d;
  }
  return sum;
}

namespace {

double mean_loss(const std::vector<UnitRowMatrix>& rotated, const std::vector<double>& weights,
                 const UnitRowMatrix& mean) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rotated.size(); ++i) {
    const double d = ps_dist(rotated[i], mean);
    sum += weights[i] * d * d;
  }
  return sum;
}

} // namespace

MeanReport frechet_mean(const WeightedSampleSet& samples, const SolverConfig& cfg) {
  const auto& points = samples.points();
  const auto& weights = samples.weights();
  const std::size_t n = samples.size();

  // Start from the sample of least Fréchet variance.
  std::size_t start = 0;
  if (n > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = frechet_variance(samples, points[i], cfg);
      if (v < best) {
        best = v;
        start = i;
      }
    }
  }
  UnitRowMatrix mean = points[start].rep;

  std::vector<OrthogonalMatrix> rotations;
  std::vector<UnitRowMatrix> rotated;
  rotations.reserve(n);
  rotated.reserve(n);
  for (const OrbitPoint& p : points) {
    rotations.push_back(procrustes(p.rep.matrix(), mean.matrix()));
    rotated.push_back(p.rep.rotated(rotations.back()));
  }

  MeanReport report{OrbitPoint{mean}, {mean_loss(rotated, weights, mean)}, {}, 0, false};

  for (int s = 0; s < cfg.max_outer; ++s) {
    const OrbitPoint target{mean};
    for (std::size_t i = 0; i < n; ++i) {
      try {
        AlignmentResult r = align(points[i], target, cfg, rotations[i]);
        rotations[i] = r.rotation;
      } catch (const GeometryError& e) {
        fail(e.kind(), "alignment of sample " + std::to_string(i) + " failed: " + e.detail(), i);
      }
      rotated[i] = points[i].rep.rotated(rotations[i]);
    }
    mean = ps_frechet_fixed(rotated, weights, cfg, mean).mean;

    const double previous = report.loss_history.back();
    const double current = mean_loss(rotated, weights, mean);
    report.loss_history.push_back(current);
    report.outer_iterations = s + 1;
    if (std::abs(previous - current) <= cfg.mean_tol * std::max(1.0, previous)) {
      report.converged = true;
      break;
    }
  }
  report.mean = OrbitPoint{std::move(mean)};
  report.rotations = std::move(rotations);
  return report;
}

} // namespace corrgeo
