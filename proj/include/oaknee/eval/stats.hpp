#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace oaknee::eval {

struct ClassStats {
  std::size_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;  // unbiased; 0 for a single sample
};

struct DensityStats {
  std::array<ClassStats, 2> classes;      // index = label
  std::vector<double> bin_centers;        // shared bins over the observed range
  std::array<std::vector<double>, 2> density;  // per class, integrates to 1
  double bin_width = 0.0;
};

inline constexpr std::size_t kDensityBins = 64;

DensityStats class_density_stats(std::span<const double> values, std::span<const int> labels,
                                 std::size_t bins = kDensityBins);

}  // namespace oaknee::eval
