#pragma once

#include <algorithm>
#include <cmath>

#include "corrgeo/types.hpp"

namespace corrgeo {

/// Next trial step after `step` failed the sufficient-decrease test.
/// Minimizes the quadratic through f(0) = f0, f'(0) = slope and
/// f(step) = f_trial, safeguarded to [0.1, cfg.backtrack] * step. Plain
/// halving would lock onto twice the optimal step whenever the curvature
/// is a power of two, and gradient descent then oscillates.
inline double armijo_next_step(double step, double f0, double slope, double f_trial,
                               const ArmijoConfig& cfg) {
  const double upper = cfg.backtrack * step;
  if (!std::isfinite(f_trial)) return upper;
  const double curvature = (f_trial - f0 - slope * step) / (step * step);
  if (!(curvature > 0.0)) return upper;
  return std::clamp(-slope / (2.0 * curvature), 0.1 * step, upper);
}

} // namespace corrgeo
