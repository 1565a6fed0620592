#include "oaknee/eval/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oaknee/error.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::eval {

namespace {

double gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n == 0.0) return 0.0;
  const double p0 = c0 / n, p1 = c1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct TreeBuilder {
  std::span<const double> x;
  std::size_t d;
  std::span<const int> y;
  std::size_t max_features;
  std::size_t min_samples_split;
  double total;
  Rng& rng;
  std::vector<double>& importance;

  double value(std::size_t sample, std::size_t feature) const { return x[sample * d + feature]; }

  void grow(std::vector<std::size_t> samples) {
    struct Pending {
      std::vector<std::size_t> samples;
    };
    std::vector<Pending> stack;
    stack.push_back({std::move(samples)});
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    std::vector<std::size_t> order;

    while (!stack.empty()) {
      auto node = std::move(stack.back().samples);
      stack.pop_back();
      const double n = static_cast<double>(node.size());
      double c1 = 0.0;
      for (auto s : node) c1 += y[s];
      const double c0 = n - c1;
      if (node.size() < min_samples_split || c0 == 0.0 || c1 == 0.0) continue;
      const double parent = gini(c0, c1);

      std::shuffle(features.begin(), features.end(), rng);
      bool found = false;
      double best_gain = -1.0;
      std::size_t best_feature = 0;
      double best_threshold = 0.0;
      for (std::size_t fi = 0; fi < d; ++fi) {
        // Inspect max_features candidates, continuing past them only until a
        // valid partition exists.
        if (fi >= max_features && found) break;
        const std::size_t f = features[fi];
        order = node;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a, f) < value(b, f); });
        double l0 = 0.0, l1 = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          (y[order[i]] == 1 ? l1 : l0) += 1.0;
          const double v = value(order[i], f), next = value(order[i + 1], f);
          if (v == next) continue;
          const double nl = l0 + l1, nr = n - nl;
          const double child = (nl * gini(l0, l1) + nr * gini(c0 - l0, c1 - l1)) / n;
          const double gain = parent - child;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = 0.5 * (v + next);
            if (best_threshold == next) best_threshold = v;
            found = true;
          }
        }
      }
      if (!found) continue;
      importance[best_feature] += n / total * best_gain;
      std::vector<std::size_t> left, right;
      for (auto s : node) (value(s, best_feature) <= best_threshold ? left : right).push_back(s);
      stack.push_back({std::move(right)});
      stack.push_back({std::move(left)});
    }
  }
};

}  // namespace

ImportanceReport forest_importance(std::span<const double> features, std::size_t n_features,
                                   std::span<const int> labels, const ForestConfig& cfg) {
  if (n_features == 0 || features.size() != labels.size() * n_features) {
    throw InvalidArgument("feature matrix does not match label count");
  }
  const std::size_t n = labels.size();
  if (n < 10) throw InvalidArgument("forest importance needs at least 10 samples");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw InvalidArgument("labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  if (pos == 0 || pos == n) throw DegenerateLabels("forest importance needs both classes present");
  if (cfg.n_trees == 0) throw InvalidArgument("forest needs at least one tree");

  const std::size_t max_features =
      cfg.max_features ? std::min(cfg.max_features, n_features)
                       : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));

  std::vector<double> total(n_features, 0.0);
  std::vector<double> tree_importance(n_features);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed({cfg.seed, t}));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> bootstrap(n);
    for (auto& s : bootstrap) s = pick(rng);
    std::fill(tree_importance.begin(), tree_importance.end(), 0.0);
    TreeBuilder builder{features, n_features, labels, max_features, cfg.min_samples_split,
                        static_cast<double>(n), rng, tree_importance};
    builder.grow(std::move(bootstrap));
    const double s = std::accumulate(tree_importance.begin(), tree_importance.end(), 0.0);
    if (s > 0.0) {
      for (std::size_t f = 0; f < n_features; ++f) total[f] += tree_importance[f] / s;
    }
  }

  ImportanceReport report;
  report.importance = total;
  const double s = std::accumulate(total.begin(), total.end(), 0.0);
  if (s > 0.0) {
    for (auto& v : report.importance) v /= s;
  }
  report.ranking.resize(n_features);
  std::iota(report.ranking.begin(), report.ranking.end(), 0);
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return report.importance[a] > report.importance[b]; });
  return report;
}

}  // namespace oaknee::eval
