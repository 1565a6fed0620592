#include "oaknee/models/dataset.hpp"

#include <cmath>

#include "oaknee/error.hpp"

namespace oaknee::models {

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

std::vector<double> Dataset::feature_matrix() const {
  std::vector<double> out;
  out.reserve(samples.size() * feature_dim());
  for (const auto& s : samples) out.insert(out.end(), s.features.begin(), s.features.end());
  return out;
}

std::vector<double> Dataset::feature_column(std::size_t j) const {
  if (j >= feature_dim()) throw IndexError("feature column " + std::to_string(j) + " out of range");
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.features.at(j));
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.feature_names = feature_names;
  out.samples.reserve(indices.size());
  for (auto i : indices) out.samples.push_back(samples.at(i));
  return out;
}

void Dataset::validate() const {
  const bool patches = has_patches();
  for (const auto& s : samples) {
    if (s.features.size() != feature_dim()) {
      throw ShapeError("knee " + s.knee_id + " has " + std::to_string(s.features.size()) + " features, expected " +
                       std::to_string(feature_dim()));
    }
    if (s.patch.empty() == patches) throw ShapeError("knee " + s.knee_id + " is inconsistent about its ROI patch");
    if (s.label != 0 && s.label != 1) throw InvalidArgument("knee " + s.knee_id + " has a non-binary label");
  }
}

Standardizer Standardizer::fit(const Dataset& data) {
  const std::size_t d = data.feature_dim();
  Standardizer st;
  st.mean.assign(d, 0.0);
  st.scale.assign(d, 1.0);
  if (data.empty()) return st;
  const double n = static_cast<double>(data.size());
  for (const auto& s : data.samples) {
    for (std::size_t j = 0; j < d; ++j) st.mean[j] += s.features[j];
  }
  for (auto& m : st.mean) m /= n;
  std::vector<double> sq(d, 0.0);
  for (const auto& s : data.samples) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = s.features[j] - st.mean[j];
      sq[j] += v * v;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(sq[j] / n);
    st.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return st;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw ShapeError("standardizer expects " + std::to_string(mean.size()) + " features, got " +
                     std::to_string(x.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

}  // namespace oaknee::models
