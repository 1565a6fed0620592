#include "oaknee/eval/roc.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "oaknee/error.hpp"

namespace oaknee::eval {

RocResult roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
  RocResult r;
  for (int l : labels) {
    if (l == 1) {
      ++r.n_pos;
    } else if (l == 0) {
      ++r.n_neg;
    } else {
      throw InvalidArgument("labels must be 0 or 1");
    }
  }
  if (r.n_pos == 0 || r.n_neg == 0) throw DegenerateLabels("ROC needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mid-ranks (1-based); rank sums stay exact multiples of 1/2.
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += mid;
    }
    i = j;
  }
  const double p = static_cast<double>(r.n_pos), n = static_cast<double>(r.n_neg);
  r.u_statistic = rank_sum_pos - p * (p + 1.0) / 2.0;
  r.auc = r.u_statistic / (p * n);

  // Threshold sweep from the highest score down.
  r.curve.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = order.size(); i > 0;) {
    std::size_t j = i;
    const double threshold = scores[order[i - 1]];
    while (j > 0 && scores[order[j - 1]] == threshold) {
      (labels[order[j - 1]] == 1 ? tp : fp) += 1;
      --j;
    }
    r.curve.push_back({threshold, static_cast<double>(fp) / n, static_cast<double>(tp) / p});
    i = j;
  }
  return r;
}

double trapezoid_area(const std::vector<RocPoint>& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += (curve[i].fpr - curve[i - 1].fpr) * 0.5 * (curve[i].tpr + curve[i - 1].tpr);
  }
  return area;
}

}  // namespace oaknee::eval
