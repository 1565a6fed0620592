#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace oaknee::geometry {

/// Landmark coordinate in millimeters. Image convention: x to the right,
/// y downwards, so the femur sits above (smaller y than) the tibia.
struct Point2D {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

inline constexpr std::size_t kFemurPoints = 13;
inline constexpr std::size_t kTibiaPoints = 17;
inline constexpr std::size_t kJs2Length = kFemurPoints * kTibiaPoints;  // 221

double distance(Point2D a, Point2D b) noexcept;

/// Which of the raw landmarks play which anatomical role.
/// `tibia_extent_pair` is ordered (medial, lateral).
struct LandmarkRoles {
  std::vector<std::size_t> femur_indices;
  std::vector<std::size_t> tibia_indices;
  std::array<std::size_t, 2> plateau_pair{};
  std::array<std::size_t, 2> tibia_extent_pair{};

  /// Role layout of the bundled 74-point template (see io/synth).
  static LandmarkRoles defaults();
};

/// Rotation about the origin followed by translation: p' = R(rotation) p + t.
struct RigidTransform {
  double rotation = 0.0;  // radians, in (-pi, pi]
  double tx = 0.0;
  double ty = 0.0;

  Point2D apply(Point2D p) const noexcept;
  /// Rotation by `angle` about `center`.
  static RigidTransform about(Point2D center, double angle);
};

class LandmarkSet {
 public:
  /// Throws InvalidLandmarks on non-finite points, out-of-range or duplicate
  /// indices, or wrong femur/tibia subset sizes.
  LandmarkSet(std::vector<Point2D> points, LandmarkRoles roles);

  const std::vector<Point2D>& points() const noexcept { return points_; }
  const LandmarkRoles& roles() const noexcept { return roles_; }

  std::vector<Point2D> femur_points() const;
  std::vector<Point2D> tibia_points() const;
  std::pair<Point2D, Point2D> plateau_points() const;
  /// (medial, lateral) tibia extent landmarks.
  std::pair<Point2D, Point2D> tibia_extent_points() const;

  LandmarkSet transformed(const RigidTransform& t) const;
  LandmarkSet scaled(double factor) const;

 private:
  std::vector<Point2D> points_;
  LandmarkRoles roles_;
};

/// Pairwise tibia-femur distances, outer loop over tibia points and inner loop
/// over femur points: entry k = |tibia[k / F] - femur[k % F]|.
std::vector<double> compute_js2(std::span<const Point2D> tibia, std::span<const Point2D> femur);
std::vector<double> compute_js2(const LandmarkSet& landmarks);

std::size_t js2_index(std::size_t tibia_i, std::size_t femur_i);
std::pair<std::size_t, std::size_t> js2_pair(std::size_t index);

/// Euclidean distance between the two tibia extent landmarks.
double tibia_width(const LandmarkSet& landmarks);

struct PlateauAlignment {
  RigidTransform transform;
  LandmarkSet landmarks;
};

/// Rotates all landmarks about the plateau-pair midpoint so the tibial
/// plateau line is horizontal. The line angle is folded into (-pi/2, pi/2],
/// so a joint tilted by less than 90 degrees stays upright.
PlateauAlignment align_to_plateau(const LandmarkSet& landmarks);

struct MinJswResult {
  double value_mm = 0.0;
  bool contours_intersect = false;
};

inline constexpr double kDefaultDensifyStep = 0.1;

/// Minimum distance from the densified tibia contour to the femur polyline.
/// Intersecting or touching contours yield 0 with the warning flag set.
MinJswResult min_jsw(std::span<const Point2D> tibia, std::span<const Point2D> femur,
                     double densify_step = kDefaultDensifyStep);
MinJswResult min_jsw(const LandmarkSet& landmarks, double densify_step = kDefaultDensifyStep);

/// Vertical femur-tibia gap at normalized position `x_norm` divided by tibia
/// width. x_norm = 0 sits at the most medial femur landmark and 1 lies one
/// tibia width towards the lateral side. Expects plateau-aligned input.
double fixed_jsw(const LandmarkSet& landmarks, double x_norm);

inline constexpr double kMedialFjswX = 0.225;
inline constexpr double kLateralFjswX = 0.8;

struct JswMeasurements {
  double min_jsw = 0.0;   // mm
  double med_fjsw = 0.0;  // gap / tibia width
  double lat_fjsw = 0.0;  // gap / tibia width
  bool contours_intersect = false;
};

/// Aligns the landmarks to the plateau, then measures minJSW and both fJSW.
JswMeasurements measure_jsw(const LandmarkSet& landmarks, double densify_step = kDefaultDensifyStep);

/// Densifies a polyline: each segment is split into ceil(len / step) equal
/// pieces; the result contains every original vertex.
std::vector<Point2D> densify(std::span<const Point2D> polyline, double step);

double point_segment_distance(Point2D p, Point2D a, Point2D b) noexcept;
bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d) noexcept;

}  // namespace oaknee::geometry
