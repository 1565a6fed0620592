#include "oaknee/geometry/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <unordered_set>

#include "oaknee/error.hpp"

namespace oaknee::geometry {

namespace {

void check_indices(const std::vector<std::size_t>& idx, std::size_t n, const char* what) {
  std::unordered_set<std::size_t> seen;
  for (auto i : idx) {
    if (i >= n) {
      throw InvalidLandmarks(std::string(what) + " index " + std::to_string(i) + " out of range (" +
                             std::to_string(n) + " points)");
    }
    if (!seen.insert(i).second) {
      throw InvalidLandmarks(std::string(what) + " index " + std::to_string(i) + " repeated");
    }
  }
}

std::vector<Point2D> gather(const std::vector<Point2D>& pts, const std::vector<std::size_t>& idx) {
  std::vector<Point2D> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(pts[i]);
  return out;
}

double normalize_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double cross(Point2D o, Point2D a, Point2D b) noexcept {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point2D p, Point2D a, Point2D b) noexcept {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

// y values where the vertical line x = xq crosses the polyline.
std::vector<double> vertical_crossings(std::span<const Point2D> poly, double xq) {
  std::vector<double> ys;
  for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
    const Point2D a = poly[i];
    const Point2D b = poly[i + 1];
    if (xq < std::min(a.x, b.x) || xq > std::max(a.x, b.x)) continue;
    if (a.x == b.x) {
      ys.push_back(a.y);
      ys.push_back(b.y);
    } else {
      const double t = (xq - a.x) / (b.x - a.x);
      ys.push_back(a.y + t * (b.y - a.y));
    }
  }
  return ys;
}

}  // namespace

double distance(Point2D a, Point2D b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

LandmarkRoles LandmarkRoles::defaults() {
  LandmarkRoles r;
  r.femur_indices.resize(kFemurPoints);
  std::iota(r.femur_indices.begin(), r.femur_indices.end(), 11);
  r.tibia_indices.resize(kTibiaPoints);
  std::iota(r.tibia_indices.begin(), r.tibia_indices.end(), 46);
  r.plateau_pair = {48, 60};
  r.tibia_extent_pair = {62, 46};
  return r;
}

Point2D RigidTransform::apply(Point2D p) const noexcept {
  const double c = std::cos(rotation);
  const double s = std::sin(rotation);
  return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
}

RigidTransform RigidTransform::about(Point2D center, double angle) {
  RigidTransform t;
  t.rotation = normalize_angle(angle);
  const double c = std::cos(t.rotation);
  const double s = std::sin(t.rotation);
  t.tx = center.x - (c * center.x - s * center.y);
  t.ty = center.y - (s * center.x + c * center.y);
  return t;
}

LandmarkSet::LandmarkSet(std::vector<Point2D> points, LandmarkRoles roles)
    : points_(std::move(points)), roles_(std::move(roles)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].x) || !std::isfinite(points_[i].y)) {
      throw InvalidLandmarks("point " + std::to_string(i) + " is not finite");
    }
  }
  if (roles_.femur_indices.size() != kFemurPoints) {
    throw InvalidLandmarks("expected 13 femur indices, got " + std::to_string(roles_.femur_indices.size()));
  }
  if (roles_.tibia_indices.size() != kTibiaPoints) {
    throw InvalidLandmarks("expected 17 tibia indices, got " + std::to_string(roles_.tibia_indices.size()));
  }
  const std::size_t n = points_.size();
  check_indices(roles_.femur_indices, n, "femur");
  check_indices(roles_.tibia_indices, n, "tibia");
  check_indices({roles_.plateau_pair.begin(), roles_.plateau_pair.end()}, n, "plateau_pair");
  check_indices({roles_.tibia_extent_pair.begin(), roles_.tibia_extent_pair.end()}, n, "tibia_extent_pair");
}

std::vector<Point2D> LandmarkSet::femur_points() const { return gather(points_, roles_.femur_indices); }
std::vector<Point2D> LandmarkSet::tibia_points() const { return gather(points_, roles_.tibia_indices); }

std::pair<Point2D, Point2D> LandmarkSet::plateau_points() const {
  return {points_[roles_.plateau_pair[0]], points_[roles_.plateau_pair[1]]};
}

std::pair<Point2D, Point2D> LandmarkSet::tibia_extent_points() const {
  return {points_[roles_.tibia_extent_pair[0]], points_[roles_.tibia_extent_pair[1]]};
}

LandmarkSet LandmarkSet::transformed(const RigidTransform& t) const {
  std::vector<Point2D> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(t.apply(p));
  return LandmarkSet(std::move(out), roles_);
}

LandmarkSet LandmarkSet::scaled(double factor) const {
  std::vector<Point2D> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back({p.x * factor, p.y * factor});
  return LandmarkSet(std::move(out), roles_);
}

std::vector<double> compute_js2(std::span<const Point2D> tibia, std::span<const Point2D> femur) {
  if (tibia.empty() || femur.empty()) {
    throw InvalidLandmarks("JS2 needs non-empty tibia and femur point lists");
  }
  std::vector<double> out;
  out.reserve(tibia.size() * femur.size());
  for (const auto& t : tibia) {
    for (const auto& f : femur) out.push_back(distance(t, f));
  }
  return out;
}

std::vector<double> compute_js2(const LandmarkSet& landmarks) {
  const auto tibia = landmarks.tibia_points();
  const auto femur = landmarks.femur_points();
  return compute_js2(tibia, femur);
}

std::size_t js2_index(std::size_t tibia_i, std::size_t femur_i) {
  if (tibia_i >= kTibiaPoints || femur_i >= kFemurPoints) {
    throw IndexError("JS2 pair (" + std::to_string(tibia_i) + ", " + std::to_string(femur_i) +
                     ") out of range");
  }
  return tibia_i * kFemurPoints + femur_i;
}

std::pair<std::size_t, std::size_t> js2_pair(std::size_t index) {
  if (index >= kJs2Length) throw IndexError("JS2 index " + std::to_string(index) + " out of range");
  return {index / kFemurPoints, index % kFemurPoints};
}

double tibia_width(const LandmarkSet& landmarks) {
  const auto [medial, lateral] = landmarks.tibia_extent_points();
  const double w = distance(medial, lateral);
  if (!(w > 0.0)) throw DegenerateGeometry("tibia extent landmarks coincide");
  return w;
}

PlateauAlignment align_to_plateau(const LandmarkSet& landmarks) {
  const auto [a, b] = landmarks.plateau_points();
  if (a == b) throw DegenerateGeometry("plateau landmarks coincide");
  double theta = std::atan2(b.y - a.y, b.x - a.x);
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (theta > kHalfPi) theta -= std::numbers::pi;
  if (theta <= -kHalfPi) theta += std::numbers::pi;
  const Point2D mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const auto t = RigidTransform::about(mid, -theta);
  return {t, landmarks.transformed(t)};
}

double point_segment_distance(Point2D p, Point2D a, Point2D b) noexcept {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  if (len2 == 0.0) return distance(p, a);
  const double t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return distance(p, {a.x + t * dx, a.y + t * dy});
}

bool segments_intersect(Point2D a, Point2D b, Point2D c, Point2D d) noexcept {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && on_segment(a, c, d)) return true;
  if (d2 == 0 && on_segment(b, c, d)) return true;
  if (d3 == 0 && on_segment(c, a, b)) return true;
  if (d4 == 0 && on_segment(d, a, b)) return true;
  return false;
}

std::vector<Point2D> densify(std::span<const Point2D> polyline, double step) {
  if (!(step > 0.0)) throw InvalidArgument("densify step must be > 0");
  std::vector<Point2D> out;
  if (polyline.empty()) return out;
  out.push_back(polyline.front());
  for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
    const Point2D a = polyline[i];
    const Point2D b = polyline[i + 1];
    const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(distance(a, b) / step)));
    for (std::size_t k = 1; k < pieces; ++k) {
      const double t = static_cast<double>(k) / static_cast<double>(pieces);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    out.push_back(b);
  }
  return out;
}

MinJswResult min_jsw(std::span<const Point2D> tibia, std::span<const Point2D> femur, double densify_step) {
  if (tibia.size() < 2 || femur.size() < 2) {
    throw InvalidLandmarks("minJSW needs at least two points per contour");
  }
  for (std::size_t i = 0; i + 1 < tibia.size(); ++i) {
    for (std::size_t j = 0; j + 1 < femur.size(); ++j) {
      if (segments_intersect(tibia[i], tibia[i + 1], femur[j], femur[j + 1])) return {0.0, true};
    }
  }
  const auto samples = densify(tibia, densify_step);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) {
    for (std::size_t j = 0; j + 1 < femur.size(); ++j) {
      best = std::min(best, point_segment_distance(p, femur[j], femur[j + 1]));
    }
  }
  return {best, false};
}

MinJswResult min_jsw(const LandmarkSet& landmarks, double densify_step) {
  const auto tibia = landmarks.tibia_points();
  const auto femur = landmarks.femur_points();
  return min_jsw(tibia, femur, densify_step);
}

double fixed_jsw(const LandmarkSet& landmarks, double x_norm) {
  if (!(x_norm >= 0.0 && x_norm <= 1.0)) throw InvalidArgument("fJSW position must lie in [0, 1]");
  const double width = tibia_width(landmarks);
  const auto [medial, lateral] = landmarks.tibia_extent_points();
  if (medial.x == lateral.x) throw DegenerateGeometry("tibia extent has no horizontal span");
  const double to_lateral = lateral.x > medial.x ? 1.0 : -1.0;

  const auto femur = landmarks.femur_points();
  const auto tibia = landmarks.tibia_points();
  double origin = femur.front().x;
  for (const auto& p : femur) {
    origin = to_lateral > 0 ? std::min(origin, p.x) : std::max(origin, p.x);
  }
  const double xq = origin + to_lateral * x_norm * width;

  const auto yf = vertical_crossings(femur, xq);
  const auto yt = vertical_crossings(tibia, xq);
  if (yf.empty() || yt.empty()) {
    throw OutOfSupport("fJSW position " + std::to_string(x_norm) + " (x=" + std::to_string(xq) +
                       " mm) outside the femur/tibia contour overlap");
  }
  double gap = std::numeric_limits<double>::infinity();
  for (double f : yf) {
    for (double t : yt) gap = std::min(gap, std::abs(t - f));
  }
  return gap / width;
}

JswMeasurements measure_jsw(const LandmarkSet& landmarks, double densify_step) {
  const auto aligned = align_to_plateau(landmarks).landmarks;
  const auto m = min_jsw(aligned, densify_step);
  JswMeasurements out;
  out.min_jsw = m.value_mm;
  out.contours_intersect = m.contours_intersect;
  out.med_fjsw = fixed_jsw(aligned, kMedialFjswX);
  out.lat_fjsw = fixed_jsw(aligned, kLateralFjswX);
  return out;
}

}  // namespace oaknee::geometry
