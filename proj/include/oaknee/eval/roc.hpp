#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oaknee::eval {

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocResult {
  double auc = 0.0;
  std::vector<RocPoint> curve;  // (0,0) first, (1,1) last
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  /// Mann-Whitney U of the positives (ties count one half).
  double u_statistic = 0.0;
};

/// AUC from the rank-sum statistic with mid-ranks for ties; the curve is a
/// threshold sweep over the distinct scores. Throws DegenerateLabels unless
/// both classes are present.
RocResult roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Trapezoidal area under a curve's (fpr, tpr) points.
double trapezoid_area(const std::vector<RocPoint>& curve);

}  // namespace oaknee::eval
