#pragma once

#include <cstddef>
#include <vector>

#include "oaknee/imaging/imaging.hpp"

namespace oaknee::texture {

struct LbpConfig {
  std::size_t neighbors = 8;  // P >= 4
  double radius = 1.0;        // R >= 1, pixels
};

/// Rotation-invariant uniform LBP (riu2) histogram with P + 2 bins,
/// normalized to sum 1. Neighbours are bilinearly sampled on a circle of
/// radius R; a neighbour equal to the centre counts as set. Interior pixels
/// only (those whose whole circle lies inside the patch).
std::vector<double> lbp_histogram(const imaging::RasterImage& patch, const LbpConfig& cfg = {});

inline const std::vector<std::size_t> kDefaultBoxSizes = {2, 3, 4, 6, 8, 12, 16};

/// Differential box-counting fractal dimension of the intensity surface.
/// For box size s the grid holds floor(W/s) x floor(H/s) whole cells, each
/// contributing floor(max/h) - floor(min/h) + 1 boxes with
/// h = s * 256 / min(W, H); the count is scaled by the ratio of patch area
/// to covered area. Scales outside [2, min(W, H) / 2] are skipped.
double fractal_dimension(const imaging::RasterImage& patch,
                         const std::vector<std::size_t>& box_sizes = kDefaultBoxSizes);

struct TextureFeatures {
  std::vector<double> lbp_hist;
  double fd = 0.0;
};

TextureFeatures texture_features(const imaging::RasterImage& patch, const LbpConfig& cfg = {});

}  // namespace oaknee::texture
