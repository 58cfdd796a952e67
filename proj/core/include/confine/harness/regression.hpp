#pragma once

#include <vector>

namespace confine::harness {

struct RegressionStats {
  /// Coefficient of determination of the least-squares line y = a + b x.
  double r2_linear = 0.0;
  /// Same for y = a + b ln x.
  double r2_log = 0.0;
  /// b of the linear fit.
  double slope = 0.0;
  double intercept = 0.0;
  double log_slope = 0.0;
  double log_intercept = 0.0;
};

/// Throws kDegenerateInput for fewer than 3 points, mismatched lengths, all
/// xs equal, or a non-positive x. When every y is equal both r2 are 1.
RegressionStats fit_stats(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace confine::harness
