#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "oaknee/geometry/geometry.hpp"
#include "oaknee/imaging/imaging.hpp"

namespace oaknee::io {

/// Per-class parameters are indexed by label: [0] non-OA, [1] OA.
struct SynthConfig {
  std::size_t n_knees = 400;
  double oa_fraction = 0.5;
  std::uint64_t seed = 7;
  double spacing_mm = 0.2;

  double tibia_width_mean = 75.0;
  double tibia_width_std = 5.0;
  /// Medial joint-space gap (the JS2[192] distance): truncated normal with
  /// this post-truncation mean / std and lower bound.
  std::array<double, 2> medial_gap_mean{5.17, 3.98};
  std::array<double, 2> medial_gap_std{0.96, 1.57};
  double gap_lower_bound = 0.5;
  std::array<double, 2> lateral_gap_mean{6.5, 5.5};
  std::array<double, 2> lateral_gap_std{0.8, 1.0};
  /// Osteophyte severity o = scale * |N(0, 1)|, capped at 2.5 mm.
  std::array<double, 2> osteophyte_scale{0.3, 0.9};
  double landmark_jitter_mm = 0.5;
  double max_rotation_deg = 5.0;

  /// Trabecular texture: Hurst exponent of the fractal surface (lower is
  /// rougher) and its contrast in 16-bit units.
  std::array<double, 2> hurst_mean{0.85, 0.45};
  double hurst_std = 0.05;
  std::array<double, 2> texture_contrast{7600.0, 8400.0};
  double noise_std = 3000.0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

SynthConfig parse_synth_config(const std::string& json_text, const std::string& source);
SynthConfig read_synth_config(const std::filesystem::path& path);
std::string synth_config_json(const SynthConfig& cfg);

/// Normal distribution truncated below at `lower`, parameterized so the
/// truncated distribution has the requested mean and standard deviation.
struct TruncatedNormal {
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;

  static TruncatedNormal calibrate(double mean, double stddev, double lower);
  double quantile(double u) const;
  double mean() const;
  double stddev() const;
};

/// Knee-frame geometry. x runs from the lateral tibia edge (0) to the medial
/// edge (width), y points down; `joint_line_y` is the base plateau level.
struct KneeShape {
  double width = 75.0;
  double medial_gap = 5.0;
  double lateral_gap = 6.0;
  double osteophyte = 0.0;
  double joint_line_y = 18.0;
  double margin_x = 6.0;
  double rotation = 0.0;  // radians, applied about the image centre
  double image_width_mm = 0.0;
  double image_height_mm = 0.0;

  double tibia_y(double x) const;
  double femur_y(double x) const;
  /// Knee frame -> image millimeters (shift by margin_x, then rotate).
  geometry::Point2D to_image(geometry::Point2D p) const;
  geometry::Point2D to_knee(geometry::Point2D p) const;
};

struct SynthKnee {
  std::string knee_id;
  std::string subject_id;
  char side = 'L';
  int kl_grade = 0;
  int label = 0;
  KneeShape shape;
  double hurst = 0.5;
  std::vector<geometry::Point2D> points;  // 74 landmarks, image millimeters
  imaging::RasterImage image;             // 16-bit
};

/// Cohort-level draws shared by every knee: class assignment and the
/// stratum of each knee within its class for the medial-gap quantiles.
/// Cohort-level draws shared by all knees: class labels, the stratified
/// medial-gap quantile of each knee and the per-class gap distributions.
struct SynthPlan {
  std::vector<int> labels;
  std::vector<double> gap_quantile;
  std::array<TruncatedNormal, 2> gap_model{};
};

SynthPlan make_synth_plan(const SynthConfig& cfg);

/// Generates knee `index`; a pure function of (cfg, index).
SynthKnee synth_knee(const SynthConfig& cfg, const SynthPlan& plan, std::size_t index);
SynthKnee synth_knee(const SynthConfig& cfg, std::size_t index);

/// Landmark-only variant (no raster), for geometry-only experiments.
SynthKnee synth_landmarks(const SynthConfig& cfg, const SynthPlan& plan, std::size_t index);

/// Writes images/, points/, manifest.csv, roles.json and synth_config.json
/// under `out_dir`; returns the manifest path.
std::filesystem::path synth_generate(const SynthConfig& cfg, const std::filesystem::path& out_dir);

/// Square midpoint-displacement (diamond-square) fractional Brownian
/// surface of side 2^levels + 1, zero mean and unit standard deviation.
std::vector<double> fractal_surface(std::size_t levels, double hurst, std::uint64_t seed);

}  // namespace oaknee::io
