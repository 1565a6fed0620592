#include "oaknee/texture/texture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "oaknee/error.hpp"

namespace oaknee::texture {

namespace {

// Neighbour sampling weights are quantized to 2^-30 so the threshold test
// is evaluated in exact integer arithmetic; summation order then cannot
// break rotation symmetry or the tie rule.
constexpr double kWeightScale = 1073741824.0;  // 2^30

struct Tap {
  std::ptrdiff_t dx;
  std::ptrdiff_t dy;
  std::int64_t weight;
};

std::vector<Tap> neighbour_taps(double ox, double oy) {
  const double ax = std::abs(ox), ay = std::abs(oy);
  const double ix = std::floor(ax), iy = std::floor(ay);
  const double fx = ax - ix, fy = ay - iy;
  const auto sx = ox < 0 ? -1 : 1;
  const auto sy = oy < 0 ? -1 : 1;
  const auto near_x = static_cast<std::ptrdiff_t>(ix) * sx, far_x = (static_cast<std::ptrdiff_t>(ix) + 1) * sx;
  const auto near_y = static_cast<std::ptrdiff_t>(iy) * sy, far_y = (static_cast<std::ptrdiff_t>(iy) + 1) * sy;
  auto q = [](double w) { return static_cast<std::int64_t>(std::llround(w * kWeightScale)); };
  std::vector<Tap> taps = {{near_x, near_y, q((1 - fx) * (1 - fy))},
                           {far_x, near_y, q(fx * (1 - fy))},
                           {near_x, far_y, q((1 - fx) * fy)},
                           {far_x, far_y, q(fx * fy)}};
  std::erase_if(taps, [](const Tap& t) { return t.weight == 0; });
  return taps;
}

}  // namespace

std::vector<double> lbp_histogram(const imaging::RasterImage& patch, const LbpConfig& cfg) {
  if (cfg.neighbors < 4) throw InvalidArgument("LBP needs at least 4 neighbours");
  if (cfg.radius < 1.0) throw InvalidArgument("LBP radius must be >= 1");
  const std::size_t p = cfg.neighbors;
  const auto margin = static_cast<std::size_t>(std::ceil(cfg.radius));
  if (patch.width() <= 2 * margin || patch.height() <= 2 * margin) {
    throw PatchTooSmall("patch " + std::to_string(patch.width()) + "x" + std::to_string(patch.height()) +
                        " too small for LBP radius " + std::to_string(cfg.radius));
  }

  std::vector<std::vector<Tap>> taps(p);
  for (std::size_t k = 0; k < p; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p);
    // Offsets rounded to 1e-6 px so axis-aligned neighbours land on pixels.
    const double ox = std::round(cfg.radius * std::cos(theta) * 1e6) / 1e6;
    const double oy = std::round(-cfg.radius * std::sin(theta) * 1e6) / 1e6;
    taps[k] = neighbour_taps(ox, oy);
  }

  std::vector<double> hist(p + 2, 0.0);
  std::vector<int> bits(p);
  std::size_t total = 0;
  for (std::size_t y = margin; y + margin < patch.height(); ++y) {
    for (std::size_t x = margin; x + margin < patch.width(); ++x) {
      const auto center = static_cast<std::int64_t>(std::llround(patch.at(x, y)));
      for (std::size_t k = 0; k < p; ++k) {
        std::int64_t diff = 0;
        for (const auto& t : taps[k]) {
          const auto v = static_cast<std::int64_t>(std::llround(patch.at(static_cast<std::size_t>(x + t.dx),
                                                                         static_cast<std::size_t>(y + t.dy))));
          diff += t.weight * (v - center);
        }
        bits[k] = diff >= 0 ? 1 : 0;
      }
      std::size_t transitions = 0, ones = 0;
      for (std::size_t k = 0; k < p; ++k) {
        ones += static_cast<std::size_t>(bits[k]);
        transitions += bits[k] != bits[(k + 1) % p] ? 1 : 0;
      }
      hist[transitions <= 2 ? ones : p + 1] += 1.0;
      ++total;
    }
  }
  for (auto& h : hist) h /= static_cast<double>(total);
  return hist;
}

double fractal_dimension(const imaging::RasterImage& patch, const std::vector<std::size_t>& box_sizes) {
  const std::size_t min_dim = std::min(patch.width(), patch.height());
  std::vector<double> log_inv_s, log_n;
  for (std::size_t s : box_sizes) {
    if (s < 2 || s > min_dim / 2) continue;
    const double h = static_cast<double>(s) * 256.0 / static_cast<double>(min_dim);
    const std::size_t cells_x = patch.width() / s, cells_y = patch.height() / s;
    double count = 0.0;
    for (std::size_t cy = 0; cy < cells_y; ++cy) {
      for (std::size_t cx = 0; cx < cells_x; ++cx) {
        double lo = patch.at(cx * s, cy * s), hi = lo;
        for (std::size_t y = cy * s; y < (cy + 1) * s; ++y) {
          for (std::size_t x = cx * s; x < (cx + 1) * s; ++x) {
            lo = std::min(lo, patch.at(x, y));
            hi = std::max(hi, patch.at(x, y));
          }
        }
        count += std::floor(hi / h) - std::floor(lo / h) + 1.0;
      }
    }
    // Whole cells cover only part of the patch when s does not divide it.
    const double covered = static_cast<double>(cells_x * cells_y * s * s);
    count *= static_cast<double>(patch.width() * patch.height()) / covered;
    log_inv_s.push_back(std::log(1.0 / static_cast<double>(s)));
    log_n.push_back(std::log(count));
  }
  if (log_n.size() < 3) {
    throw InsufficientScales("only " + std::to_string(log_n.size()) + " usable box sizes for a " +
                             std::to_string(patch.width()) + "x" + std::to_string(patch.height()) + " patch");
  }
  const double n = static_cast<double>(log_n.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    mx += log_inv_s[i] / n;
    my += log_n[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < log_n.size(); ++i) {
    sxy += (log_inv_s[i] - mx) * (log_n[i] - my);
    sxx += (log_inv_s[i] - mx) * (log_inv_s[i] - mx);
  }
  return sxy / sxx;
}

TextureFeatures texture_features(const imaging::RasterImage& patch, const LbpConfig& cfg) {
  return {lbp_histogram(patch, cfg), fractal_dimension(patch)};
}

}  // namespace oaknee::texture
