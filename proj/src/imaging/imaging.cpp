#include "oaknee/imaging/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "oaknee/error.hpp"

namespace oaknee::imaging {

using geometry::Point2D;

namespace {

double lerp(double a, double b, double t) noexcept { return a + t * (b - a); }

double round_half_up(double v) { return std::floor(v + 0.5); }

}  // namespace

RasterImage::RasterImage(std::size_t width, std::size_t height, double spacing_mm, BitDepth depth, double fill)
    : RasterImage(width, height, spacing_mm, depth, std::vector<double>(width * height, fill)) {}

RasterImage::RasterImage(std::size_t width, std::size_t height, double spacing_mm, BitDepth depth,
                         std::vector<double> pixels)
    : width_(width), height_(height), spacing_(spacing_mm), depth_(depth), pixels_(std::move(pixels)) {
  if (width_ < 1 || height_ < 1) throw InvalidArgument("image dimensions must be >= 1");
  if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw InvalidArgument("pixel spacing must be > 0");
  if (pixels_.size() != width_ * height_) {
    throw InvalidArgument("pixel buffer holds " + std::to_string(pixels_.size()) + " values, expected " +
                          std::to_string(width_ * height_));
  }
}

double RasterImage::sample(double x, double y, double fill) const noexcept {
  if (!(x >= 0.0 && y >= 0.0 && x <= static_cast<double>(width_ - 1) && y <= static_cast<double>(height_ - 1))) {
    return fill;
  }
  return sample_clamped(x, y);
}

double RasterImage::sample_clamped(double x, double y) const noexcept {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  const auto x0 = static_cast<std::size_t>(x);
  const auto y0 = static_cast<std::size_t>(y);
  const std::size_t x1 = std::min(x0 + 1, width_ - 1);
  const std::size_t y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  const double top = lerp(at(x0, y0), at(x1, y0), fx);
  const double bottom = lerp(at(x0, y1), at(x1, y1), fx);
  return lerp(top, bottom, fy);
}

Point2D to_pixel(Point2D mm, double spacing) noexcept { return {mm.x / spacing - 0.5, mm.y / spacing - 0.5}; }

Point2D to_mm(Point2D px, double spacing) noexcept { return {(px.x + 0.5) * spacing, (px.y + 0.5) * spacing}; }

double nearest_rank_percentile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("percentile of empty data");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

RasterImage normalize_intensity(const RasterImage& img) {
  const auto px = img.pixels();
  const double n = static_cast<double>(px.size());
  double sum = 0.0;
  for (double v : px) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : px) sq += (v - mean) * (v - mean);
  const double stddev = std::sqrt(sq / n);

  RasterImage out(img.width(), img.height(), img.spacing(), BitDepth::k8, 0.0);
  if (stddev == 0.0) return out;

  std::vector<double> z(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) z[i] = (px[i] - mean) / stddev;
  std::vector<double> sorted = z;
  std::sort(sorted.begin(), sorted.end());
  double lo = nearest_rank_percentile(sorted, 5.0);
  double hi = nearest_rank_percentile(sorted, 99.0);
  if (hi <= lo) {
    // Percentile window collapsed (>= 95% identical pixels): use full range.
    lo = sorted.front();
    hi = sorted.back();
  }
  auto dst = out.pixels();
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double c = std::clamp(z[i], lo, hi);
    dst[i] = std::clamp(round_half_up((c - lo) / (hi - lo) * 255.0), 0.0, 255.0);
  }
  return out;
}

RasterImage resize(const RasterImage& img, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw InvalidResample("resize target has a zero dimension");
  const double sx = static_cast<double>(img.width()) / static_cast<double>(width);
  const double sy = static_cast<double>(img.height()) / static_cast<double>(height);
  const double spacing = img.spacing() * sx;
  RasterImage out(width, height, spacing, img.depth());
  for (std::size_t y = 0; y < height; ++y) {
    const double src_y = (static_cast<double>(y) + 0.5) * sy - 0.5;
    for (std::size_t x = 0; x < width; ++x) {
      const double src_x = (static_cast<double>(x) + 0.5) * sx - 0.5;
      out.at(x, y) = img.sample_clamped(src_x, src_y);
    }
  }
  return out;
}

RasterImage resample(const RasterImage& img, double target_spacing) {
  if (!(target_spacing > 0.0)) throw InvalidResample("target spacing must be > 0");
  const double ratio = img.spacing() / target_spacing;
  const auto w = static_cast<std::size_t>(std::llround(static_cast<double>(img.width()) * ratio));
  const auto h = static_cast<std::size_t>(std::llround(static_cast<double>(img.height()) * ratio));
  if (w == 0 || h == 0) {
    throw InvalidResample("resampling " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                          " to spacing " + std::to_string(target_spacing) + " gives an empty image");
  }
  if (ratio == 1.0) return img;
  RasterImage out(w, h, target_spacing, img.depth());
  const double step = target_spacing / img.spacing();
  for (std::size_t y = 0; y < h; ++y) {
    const double src_y = (static_cast<double>(y) + 0.5) * step - 0.5;
    for (std::size_t x = 0; x < w; ++x) {
      const double src_x = (static_cast<double>(x) + 0.5) * step - 0.5;
      out.at(x, y) = img.sample_clamped(src_x, src_y);
    }
  }
  return out;
}

RasterImage rotate_image(const RasterImage& img, double angle, Point2D center_px) {
  if (std::abs(angle) > std::numbers::pi) throw InvalidArgument("rotation angle must lie in [-pi, pi]");
  if (angle == 0.0) return img;
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  RasterImage out(img.width(), img.height(), img.spacing(), img.depth());
  for (std::size_t y = 0; y < img.height(); ++y) {
    const double dy = static_cast<double>(y) - center_px.y;
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double dx = static_cast<double>(x) - center_px.x;
      // Inverse rotation maps the output pixel back into the source.
      const double sx = c * dx + s * dy + center_px.x;
      const double sy = -s * dx + c * dy + center_px.y;
      out.at(x, y) = img.sample(sx, sy, 0.0);
    }
  }
  return out;
}

Roi extract_medial_roi(const RasterImage& img, const geometry::LandmarkSet& landmarks) {
  const double spacing = img.spacing();
  const double width_mm = geometry::tibia_width(landmarks);
  const auto side = static_cast<std::size_t>(std::llround(width_mm / 7.0 / spacing));
  if (side < 1) throw RoiOutOfBounds("ROI side rounds to zero pixels");

  const auto [medial, lateral] = landmarks.tibia_extent_points();
  const double to_lateral = lateral.x >= medial.x ? 1.0 : -1.0;
  const double cx_mm = medial.x + to_lateral * width_mm / 4.0;

  const auto tibia = landmarks.tibia_points();
  const auto femur = landmarks.femur_points();
  double tibia_mean_y = 0.0, femur_mean_y = 0.0;
  for (const auto& p : tibia) tibia_mean_y += p.y / static_cast<double>(tibia.size());
  for (const auto& p : femur) femur_mean_y += p.y / static_cast<double>(femur.size());
  const bool tibia_below = tibia_mean_y >= femur_mean_y;

  // Tibial margin at the ROI column; the crossing nearest the femur wins.
  bool found = false;
  double margin_mm = 0.0;
  for (std::size_t i = 0; i + 1 < tibia.size(); ++i) {
    const auto a = tibia[i];
    const auto b = tibia[i + 1];
    if (cx_mm < std::min(a.x, b.x) || cx_mm > std::max(a.x, b.x)) continue;
    const double y = a.x == b.x ? std::min(a.y, b.y) : a.y + (cx_mm - a.x) / (b.x - a.x) * (b.y - a.y);
    if (!found || (tibia_below ? y < margin_mm : y > margin_mm)) margin_mm = y;
    found = true;
  }
  if (!found) throw RoiOutOfBounds("tibial contour does not cover the medial ROI column");

  const double margin_px = margin_mm / spacing - 0.5;
  const double cx_px = cx_mm / spacing - 0.5;
  const double side_d = static_cast<double>(side);
  const long long left = std::llround(cx_px - (side_d - 1.0) / 2.0);
  const long long top = tibia_below ? static_cast<long long>(std::ceil(margin_px))
                                    : static_cast<long long>(std::floor(margin_px)) - static_cast<long long>(side) + 1;
  if (left < 0 || top < 0 || left + static_cast<long long>(side) > static_cast<long long>(img.width()) ||
      top + static_cast<long long>(side) > static_cast<long long>(img.height())) {
    throw RoiOutOfBounds("ROI [" + std::to_string(left) + "," + std::to_string(top) + "] side " +
                         std::to_string(side) + " exceeds image " + std::to_string(img.width()) + "x" +
                         std::to_string(img.height()));
  }

  RasterImage patch(side, side, spacing, img.depth());
  for (std::size_t y = 0; y < side; ++y) {
    for (std::size_t x = 0; x < side; ++x) {
      patch.at(x, y) = img.at(static_cast<std::size_t>(left) + x, static_cast<std::size_t>(top) + y);
    }
  }
  RoiSpec spec;
  spec.side = side;
  spec.left = static_cast<std::size_t>(left);
  spec.top = static_cast<std::size_t>(top);
  spec.center_x = static_cast<double>(left) + (side_d - 1.0) / 2.0;
  spec.center_y = static_cast<double>(top) + (side_d - 1.0) / 2.0;
  return {std::move(patch), spec};
}

CropOffset crop_offset(PatchMode mode, std::uint64_t rng_seed) {
  if (mode == PatchMode::kEval) return {kMaxCropOffset / 2, kMaxCropOffset / 2};
  Rng rng(rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, kMaxCropOffset);
  const std::size_t x = pick(rng);
  const std::size_t y = pick(rng);
  return {x, y};
}

std::vector<float> rescale_patch(const RasterImage& patch) {
  if (patch.width() != patch.height()) throw InvalidArgument("texture patch must be square");
  const RasterImage r = resize(patch, kRescaledSide, kRescaledSide);
  const double scale = max_value(patch.depth());
  std::vector<float> out(r.pixels().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(r.pixels()[i] / scale);
  return out;
}

nn::Tensor<float> crop_patch(std::span<const float> rescaled, CropOffset offset) {
  if (rescaled.size() != kRescaledSide * kRescaledSide) throw ShapeError("expected a 56x56 buffer");
  if (offset.x > kMaxCropOffset || offset.y > kMaxCropOffset) throw InvalidArgument("crop offset out of range");
  nn::Tensor<float> t({kCropSide, kCropSide});
  for (std::size_t y = 0; y < kCropSide; ++y) {
    for (std::size_t x = 0; x < kCropSide; ++x) {
      t[y * kCropSide + x] = rescaled[(y + offset.y) * kRescaledSide + x + offset.x];
    }
  }
  return t;
}

nn::Tensor<float> prepare_patch(const RasterImage& patch, PatchMode mode, std::uint64_t rng_seed) {
  const auto rescaled = rescale_patch(patch);
  return crop_patch(rescaled, crop_offset(mode, rng_seed));
}

nn::Tensor<float> augment(const nn::Tensor<float>& patch, const AugmentParams& params, Rng& rng) {
  if (patch.rank() != 2) throw ShapeError("augment expects an (H, W) patch");
  if (params.rotation_deg < 0.0 || params.brightness < 0.0 || params.gamma_min <= 0.0 ||
      params.gamma_max < params.gamma_min) {
    throw InvalidArgument("invalid augmentation ranges");
  }
  const std::size_t h = patch.dim(0), w = patch.dim(1);
  auto draw = [&](double lo, double hi) {
    if (lo == hi) return lo;
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  const double angle = draw(-params.rotation_deg, params.rotation_deg) * std::numbers::pi / 180.0;
  const double gamma = draw(params.gamma_min, params.gamma_max);
  const double offset = draw(-params.brightness, params.brightness);

  std::vector<double> px(patch.values().begin(), patch.values().end());
  RasterImage img(w, h, 1.0, BitDepth::k8, std::move(px));
  if (angle != 0.0) {
    img = rotate_image(img, angle, {(static_cast<double>(w) - 1.0) / 2.0, (static_cast<double>(h) - 1.0) / 2.0});
  }
  nn::Tensor<float> out(patch.shape());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = std::clamp(img.pixels()[i], 0.0, 1.0);
    if (gamma != 1.0) v = std::pow(v, gamma);
    out[i] = static_cast<float>(std::clamp(v + offset, 0.0, 1.0));
  }
  return out;
}

}  // namespace oaknee::imaging
