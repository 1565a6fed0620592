#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "oaknee/geometry/geometry.hpp"
#include "oaknee/imaging/imaging.hpp"
#include "oaknee/io/manifest.hpp"
#include "oaknee/io/synth.hpp"
#include "oaknee/models/dataset.hpp"
#include "oaknee/texture/texture.hpp"

namespace oaknee::io {

inline constexpr double kWorkingSpacing = 0.2;  // mm per pixel

/// One knee as read from disk or produced in memory.
struct KneeInput {
  std::string knee_id;
  std::string subject_id;
  int label = 0;
  imaging::RasterImage image;
  std::vector<geometry::Point2D> points;  // mm
};

/// 8-bit image at the working spacing with a horizontal tibial plateau,
/// plus the landmarks moved by the same rotation.
struct PreparedKnee {
  imaging::RasterImage image;
  geometry::LandmarkSet landmarks;
  double rotation = 0.0;  // radians applied to reach the aligned frame
};

/// normalize_intensity (16-bit input only), resample to 0.2 mm, then rotate
/// image and landmarks about the plateau-pair midpoint.
PreparedKnee preprocess_knee(const imaging::RasterImage& image, const std::vector<geometry::Point2D>& points,
                             const geometry::LandmarkRoles& roles);

/// Which descriptors make up a feature vector. Parsed from a comma list of
/// js2, jsw, minjsw, lbp, fd, roi; roi adds the image patch, not a vector.
struct FeatureSpec {
  bool js2 = false;
  bool jsw = false;
  bool minjsw = false;
  bool lbp = false;
  bool fd = false;
  bool roi = false;

  static FeatureSpec parse(const std::string& tags);
  std::string tag() const;
  std::vector<std::string> names() const;
  bool needs_roi() const noexcept { return roi || lbp || fd; }
};

struct KneeDescriptors {
  std::vector<double> js2;
  geometry::JswMeasurements jsw;
  texture::TextureFeatures texture;  // filled when requested
  imaging::Roi roi;                  // filled when requested
};

KneeDescriptors describe_knee(const PreparedKnee& knee, const FeatureSpec& spec);

/// Feature vector in the column order of spec.names().
std::vector<double> feature_vector(const KneeDescriptors& d, const FeatureSpec& spec);

/// Builds a dataset from `count` knees supplied by `load(i)`. Knees are
/// processed in parallel and stored in index order.
models::Dataset build_dataset(std::size_t count, const std::function<KneeInput(std::size_t)>& load,
                              const FeatureSpec& spec, const geometry::LandmarkRoles& roles);

/// Keeps the columns named by spec.names() (InvalidArgument if one is
/// missing) and the image patches only when spec.roi is set.
models::Dataset select_features(const models::Dataset& data, const FeatureSpec& spec);

/// Subject-level train/val partition with is_validation_subject.
std::pair<models::Dataset, models::Dataset> split_train_val(const models::Dataset& data, std::uint64_t split_seed,
                                                            double val_fraction);

/// Dataset of an in-memory synthetic cohort (no files written).
models::Dataset synth_dataset(const SynthConfig& cfg, const FeatureSpec& spec);

KneeInput load_knee(const ManifestEntry& entry);

models::Dataset build_dataset(const std::vector<ManifestEntry>& entries, const FeatureSpec& spec,
                              const geometry::LandmarkRoles& roles);

}  // namespace oaknee::io
