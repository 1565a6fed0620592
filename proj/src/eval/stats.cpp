#include "oaknee/eval/stats.hpp"

#include <algorithm>
#include <cmath>

#include "oaknee/error.hpp"

namespace oaknee::eval {

DensityStats class_density_stats(std::span<const double> values, std::span<const int> labels, std::size_t bins) {
  if (values.size() != labels.size()) throw InvalidArgument("values and labels differ in length");
  if (bins == 0) throw InvalidArgument("need at least one bin");
  DensityStats out;
  std::array<double, 2> sum{0.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("labels must be 0 or 1");
    ++out.classes[labels[i]].count;
    sum[labels[i]] += values[i];
  }
  if (out.classes[0].count == 0 || out.classes[1].count == 0) {
    throw DegenerateLabels("density statistics need both classes present");
  }
  for (int c = 0; c < 2; ++c) out.classes[c].mean = sum[c] / static_cast<double>(out.classes[c].count);
  std::array<double, 2> sq{0.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - out.classes[labels[i]].mean;
    sq[labels[i]] += d * d;
  }
  for (int c = 0; c < 2; ++c) {
    const auto n = out.classes[c].count;
    out.classes[c].stddev = n > 1 ? std::sqrt(sq[c] / static_cast<double>(n - 1)) : 0.0;
  }

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  out.bin_width = (hi - lo) / static_cast<double>(bins);
  out.bin_centers.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) out.bin_centers[b] = lo + (static_cast<double>(b) + 0.5) * out.bin_width;
  for (int c = 0; c < 2; ++c) out.density[c].assign(bins, 0.0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto b = static_cast<std::size_t>((values[i] - lo) / out.bin_width);
    b = std::min(b, bins - 1);
    out.density[labels[i]][b] += 1.0;
  }
  for (int c = 0; c < 2; ++c) {
    const double norm = static_cast<double>(out.classes[c].count) * out.bin_width;
    for (auto& d : out.density[c]) d /= norm;
  }
  return out;
}

}  // namespace oaknee::eval
