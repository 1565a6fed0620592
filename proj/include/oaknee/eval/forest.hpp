#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace oaknee::eval {

struct ForestConfig {
  std::size_t n_trees = 100;
  std::size_t max_features = 0;  // 0 -> floor(sqrt(D))
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 0;
};

struct ImportanceReport {
  std::vector<double> importance;  // sums to 1
  std::vector<std::size_t> ranking;  // feature indices, most important first
};

/// Mean decrease in Gini impurity over a forest of bootstrapped CART trees
/// with random feature subsets at every split. `features` is row-major
/// (n_samples x n_features).
ImportanceReport forest_importance(std::span<const double> features, std::size_t n_features,
                                   std::span<const int> labels, const ForestConfig& cfg = {});

}  // namespace oaknee::eval
