#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace oaknee::models {

/// One knee. `patch` is the 56x56 rescaled ROI in [0, 1] (empty when the
/// model family does not need images); `features` is the raw descriptor.
struct Sample {
  std::string knee_id;
  std::string subject_id;
  int label = 0;
  std::vector<float> patch;
  std::vector<double> features;
};

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  std::size_t feature_dim() const noexcept { return feature_names.size(); }
  bool has_patches() const noexcept { return !samples.empty() && !samples.front().patch.empty(); }

  std::vector<int> labels() const;
  /// Row-major (n x feature_dim) copy of the feature vectors.
  std::vector<double> feature_matrix() const;
  /// Column `j` of the feature matrix.
  std::vector<double> feature_column(std::size_t j) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Throws ShapeError if any sample's feature length differs from
  /// feature_dim() or patches are inconsistently present.
  void validate() const;
};

/// Per-feature z-score parameters estimated on a training set.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;  // population std, 1 for constant features

  static Standardizer fit(const Dataset& data);
  std::vector<double> apply(std::span<const double> x) const;
};

}  // namespace oaknee::models
