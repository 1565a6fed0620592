#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "oaknee/geometry/geometry.hpp"
#include "oaknee/nn/tensor.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::imaging {

enum class BitDepth : int { k8 = 8, k16 = 16 };

inline constexpr double max_value(BitDepth d) { return d == BitDepth::k8 ? 255.0 : 65535.0; }

/// Row-major intensity grid with isotropic physical spacing. Values are kept
/// as doubles inside [0, max_value(depth)] so interpolation stays exact;
/// writers quantize.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(std::size_t width, std::size_t height, double spacing_mm, BitDepth depth, double fill = 0.0);
  RasterImage(std::size_t width, std::size_t height, double spacing_mm, BitDepth depth, std::vector<double> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  double spacing() const noexcept { return spacing_; }
  BitDepth depth() const noexcept { return depth_; }

  double& at(std::size_t x, std::size_t y) noexcept { return pixels_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const noexcept { return pixels_[y * width_ + x]; }
  std::span<double> pixels() noexcept { return pixels_; }
  std::span<const double> pixels() const noexcept { return pixels_; }

  /// Bilinear sample at continuous pixel-centre coordinates. Outside
  /// [0, w-1] x [0, h-1] returns `fill`.
  double sample(double x, double y, double fill) const noexcept;
  /// Bilinear sample with coordinates clamped to the image.
  double sample_clamped(double x, double y) const noexcept;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double spacing_ = 1.0;
  BitDepth depth_ = BitDepth::k8;
  std::vector<double> pixels_;
};

/// Pixel-centre coordinate of a millimeter position: pixel i spans
/// [i * s, (i + 1) * s) mm.
geometry::Point2D to_pixel(geometry::Point2D mm, double spacing) noexcept;
geometry::Point2D to_mm(geometry::Point2D px, double spacing) noexcept;

/// Global contrast normalisation, clamp to the [5th, 99th] nearest-rank
/// percentiles, then affine map to [0, 255] with round-half-up.
RasterImage normalize_intensity(const RasterImage& img);

/// Nearest-rank percentile of already sorted data, p in [0, 100].
double nearest_rank_percentile(std::span<const double> sorted, double p);

/// Bilinear resampling to a new physical spacing; dims = round(dim * s / t).
RasterImage resample(const RasterImage& img, double target_spacing);

/// Bilinear resize to explicit dims (pixel centres aligned, edges clamped).
RasterImage resize(const RasterImage& img, std::size_t width, std::size_t height);

/// Rotates image content by `angle` about `center_px` (same convention as
/// geometry::RigidTransform::about); out-of-source samples are 0.
RasterImage rotate_image(const RasterImage& img, double angle, geometry::Point2D center_px);

struct RoiSpec {
  double center_x = 0.0;  // pixels
  double center_y = 0.0;
  std::size_t side = 0;
  std::size_t left = 0;  // top-left corner of the patch
  std::size_t top = 0;
};

struct Roi {
  RasterImage patch;
  RoiSpec spec;
};

/// Square patch of side tibia_width / 7 below the medial tibial margin,
/// horizontally centred a quarter tibia width in from the medial extent.
/// Landmarks are in millimeters; the image must be plateau-aligned.
Roi extract_medial_roi(const RasterImage& img, const geometry::LandmarkSet& landmarks);

inline constexpr std::size_t kRescaledSide = 56;
inline constexpr std::size_t kCropSide = 48;
inline constexpr std::size_t kMaxCropOffset = kRescaledSide - kCropSide;

enum class PatchMode { kTrain, kEval };

struct CropOffset {
  std::size_t x = 0;
  std::size_t y = 0;
};

CropOffset crop_offset(PatchMode mode, std::uint64_t rng_seed);

/// Rescales a square patch to 56x56 and returns values in [0, 1].
std::vector<float> rescale_patch(const RasterImage& patch);

/// 48x48 window of a 56x56 [0, 1] buffer.
nn::Tensor<float> crop_patch(std::span<const float> rescaled, CropOffset offset);

/// rescale_patch + crop_patch; shape (48, 48).
nn::Tensor<float> prepare_patch(const RasterImage& patch, PatchMode mode, std::uint64_t rng_seed);

struct AugmentParams {
  double rotation_deg = 0.0;  // uniform in [-r, r]
  double gamma_min = 1.0;
  double gamma_max = 1.0;
  double brightness = 0.0;  // uniform offset in [-b, b]
};

/// Rotation about the patch centre, then v -> v^gamma, then brightness
/// offset, clamped to [0, 1]. Operates on a 2-D (H, W) patch.
nn::Tensor<float> augment(const nn::Tensor<float>& patch, const AugmentParams& params, Rng& rng);

}  // namespace oaknee::imaging
