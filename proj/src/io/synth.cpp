#include "oaknee/io/synth.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <sstream>

#include "oaknee/error.hpp"
#include "oaknee/io/manifest.hpp"
#include "oaknee/io/pgm.hpp"
#include "oaknee/io/points.hpp"
#include "oaknee/parallel.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::io {

namespace {

using geometry::Point2D;
namespace bm = boost::math;

constexpr std::size_t kTemplatePoints = 74;
constexpr std::size_t kFemurFirst = 11;
constexpr std::size_t kTibiaFirst = 46;
constexpr double kMaxOsteophyte = 2.5;
constexpr double kMinLateralGap = 3.0;
constexpr std::size_t kTextureLevels = 9;  // 513 x 513 samples
constexpr double kImageHeightMm = 40.0;

// Intensities in 16-bit units.
constexpr double kSoftTissue = 12000.0;
constexpr double kSoftTissueGradient = 2500.0;
constexpr double kTibiaBone = 30000.0;
constexpr double kFemurBone = 32000.0;

double femur_x_fraction(std::size_t i) { return 0.075 + 0.08 * static_cast<double>(i); }
double tibia_x_fraction(std::size_t j) { return static_cast<double>(j) / 16.0; }

double edge_drop(double u) { return 1.5 * std::pow((u - 0.5) / 0.5, 4); }
double spine(double u) { return 5.0 * std::max(0.0, 1.0 - std::abs(u - 0.5) / 0.08); }
double edge_weight(double u) { return std::max(0.0, 1.0 - std::min(u, 1.0 - u) / 0.1); }

double notch(double u) {
  if (u <= 0.4 || u >= 0.6) return 0.0;
  if (u < 0.44) return 12.0 * (u - 0.4) / 0.04;
  if (u > 0.56) return 12.0 * (0.6 - u) / 0.04;
  return 12.0;
}

double condyle(double u) {
  const double c = u < 0.5375 ? 0.2 : 0.875;
  const double t = (u - c) / 0.3;
  return std::min(6.0, 4.0 * t * t);
}

double femur_osteophyte(double u, double o) {
  double v = 0.0;
  for (double end : {femur_x_fraction(0), femur_x_fraction(12)}) {
    v += 0.5 * o * std::max(0.0, 1.0 - std::abs(u - end) / 0.08);
  }
  return v;
}

double truncnorm_mean(double mu, double sigma, double a) {
  const bm::normal n;
  const double alpha = (a - mu) / sigma;
  const double lambda = bm::pdf(n, alpha) / bm::cdf(bm::complement(n, alpha));
  return mu + sigma * lambda;
}

double truncnorm_std(double mu, double sigma, double a) {
  const bm::normal n;
  const double alpha = (a - mu) / sigma;
  const double lambda = bm::pdf(n, alpha) / bm::cdf(bm::complement(n, alpha));
  return sigma * std::sqrt(std::max(0.0, 1.0 + alpha * lambda - lambda * lambda));
}

template <typename F>
double bisect(F f, double lo, double hi) {
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string id_string(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%05zu", prefix, i);
  return buf;
}

void check_pair(const std::array<double, 2>& v, const char* name, bool allow_zero) {
  for (double x : v) {
    if (!std::isfinite(x) || x < 0 || (!allow_zero && x == 0)) {
      throw InvalidArgument(std::string("synth config: ") + name + " must be " + (allow_zero ? "non-negative" : "positive"));
    }
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (n_knees == 0) throw InvalidArgument("synth config: n_knees must be positive");
  if (!(oa_fraction > 0.0 && oa_fraction < 1.0)) throw InvalidArgument("synth config: oa_fraction must lie in (0, 1)");
  if (!(spacing_mm > 0.0)) throw InvalidArgument("synth config: spacing_mm must be positive");
  if (!(tibia_width_mean > 20.0) || !(tibia_width_std >= 0.0)) {
    throw InvalidArgument("synth config: tibia width parameters out of range");
  }
  check_pair(medial_gap_mean, "medial_gap_mean", false);
  check_pair(medial_gap_std, "medial_gap_std", false);
  check_pair(lateral_gap_mean, "lateral_gap_mean", false);
  check_pair(lateral_gap_std, "lateral_gap_std", true);
  check_pair(osteophyte_scale, "osteophyte_scale", true);
  check_pair(texture_contrast, "texture_contrast", true);
  for (int c = 0; c < 2; ++c) {
    if (!(medial_gap_mean[c] > gap_lower_bound)) {
      throw InvalidArgument("synth config: medial_gap_mean must exceed gap_lower_bound");
    }
    if (!(hurst_mean[c] > 0.0 && hurst_mean[c] < 1.0)) throw InvalidArgument("synth config: hurst_mean must lie in (0, 1)");
  }
  if (!(gap_lower_bound >= 0.0)) throw InvalidArgument("synth config: gap_lower_bound must be non-negative");
  if (!(landmark_jitter_mm >= 0.0) || !(max_rotation_deg >= 0.0 && max_rotation_deg <= 45.0) ||
      !(hurst_std >= 0.0) || !(noise_std >= 0.0)) {
    throw InvalidArgument("synth config: jitter/rotation/noise parameters out of range");
  }
}

std::string synth_config_json(const SynthConfig& c) {
  nlohmann::ordered_json j;
  j["n_knees"] = c.n_knees;
  j["oa_fraction"] = c.oa_fraction;
  j["seed"] = c.seed;
  j["spacing_mm"] = c.spacing_mm;
  j["tibia_width_mean"] = c.tibia_width_mean;
  j["tibia_width_std"] = c.tibia_width_std;
  j["medial_gap_mean"] = c.medial_gap_mean;
  j["medial_gap_std"] = c.medial_gap_std;
  j["gap_lower_bound"] = c.gap_lower_bound;
  j["lateral_gap_mean"] = c.lateral_gap_mean;
  j["lateral_gap_std"] = c.lateral_gap_std;
  j["osteophyte_scale"] = c.osteophyte_scale;
  j["landmark_jitter_mm"] = c.landmark_jitter_mm;
  j["max_rotation_deg"] = c.max_rotation_deg;
  j["hurst_mean"] = c.hurst_mean;
  j["hurst_std"] = c.hurst_std;
  j["texture_contrast"] = c.texture_contrast;
  j["noise_std"] = c.noise_std;
  return j.dump(2) + "\n";
}

SynthConfig parse_synth_config(const std::string& json_text, const std::string& source) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source, e.byte, "invalid JSON");
  }
  if (!j.is_object()) throw ParseError(source, 0, "synth config must be a JSON object");
  SynthConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "n_knees") {
        c.n_knees = value.get<std::size_t>();
      } else if (key == "oa_fraction") {
        c.oa_fraction = value.get<double>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "spacing_mm") {
        c.spacing_mm = value.get<double>();
      } else if (key == "tibia_width_mean") {
        c.tibia_width_mean = value.get<double>();
      } else if (key == "tibia_width_std") {
        c.tibia_width_std = value.get<double>();
      } else if (key == "medial_gap_mean") {
        c.medial_gap_mean = value.get<std::array<double, 2>>();
      } else if (key == "medial_gap_std") {
        c.medial_gap_std = value.get<std::array<double, 2>>();
      } else if (key == "gap_lower_bound") {
        c.gap_lower_bound = value.get<double>();
      } else if (key == "lateral_gap_mean") {
        c.lateral_gap_mean = value.get<std::array<double, 2>>();
      } else if (key == "lateral_gap_std") {
        c.lateral_gap_std = value.get<std::array<double, 2>>();
      } else if (key == "osteophyte_scale") {
        c.osteophyte_scale = value.get<std::array<double, 2>>();
      } else if (key == "landmark_jitter_mm") {
        c.landmark_jitter_mm = value.get<double>();
      } else if (key == "max_rotation_deg") {
        c.max_rotation_deg = value.get<double>();
      } else if (key == "hurst_mean") {
        c.hurst_mean = value.get<std::array<double, 2>>();
      } else if (key == "hurst_std") {
        c.hurst_std = value.get<double>();
      } else if (key == "texture_contrast") {
        c.texture_contrast = value.get<std::array<double, 2>>();
      } else if (key == "noise_std") {
        c.noise_std = value.get<double>();
      } else {
        throw ParseError(source, 0, "unknown synth config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("wrong value type: ") + e.what());
  }
  c.validate();
  return c;
}

SynthConfig read_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_synth_config(ss.str(), path.string());
}

TruncatedNormal TruncatedNormal::calibrate(double mean, double stddev, double lower) {
  if (!(stddev > 0.0) || !(mean > lower)) throw InvalidArgument("truncated normal needs mean > lower and stddev > 0");
  TruncatedNormal t;
  t.lower = lower;
  // For a fixed sigma the truncated mean increases with mu; the truncated
  // spread at matched mean then increases with sigma.
  auto mu_for = [&](double sigma) {
    return bisect([&](double mu) { return truncnorm_mean(mu, sigma, lower) - mean; }, lower - 20.0 * stddev, mean);
  };
  t.sigma = bisect([&](double sigma) { return truncnorm_std(mu_for(sigma), sigma, lower) - stddev; }, 0.5 * stddev,
                   4.0 * stddev);
  t.mu = mu_for(t.sigma);
  if (std::abs(t.mean() - mean) > 1e-6 * mean || std::abs(t.stddev() - stddev) > 1e-6 * stddev) {
    throw InvalidArgument("no normal truncated at " + std::to_string(lower) + " has mean " + std::to_string(mean) +
                          " and stddev " + std::to_string(stddev));
  }
  return t;
}

double TruncatedNormal::quantile(double u) const {
  const bm::normal n;
  const double p0 = bm::cdf(n, (lower - mu) / sigma);
  const double p = std::clamp(p0 + u * (1.0 - p0), 1e-300, 1.0 - 1e-16);
  return std::max(lower, mu + sigma * bm::quantile(n, p));
}

double TruncatedNormal::mean() const { return truncnorm_mean(mu, sigma, lower); }
double TruncatedNormal::stddev() const { return truncnorm_std(mu, sigma, lower); }

double KneeShape::tibia_y(double x) const {
  const double u = x / width;
  return joint_line_y + edge_drop(u) - spine(u) - osteophyte * edge_weight(u);
}

double KneeShape::femur_y(double x) const {
  const double u = x / width;
  double gap = lateral_gap;
  if (u >= 0.875) {
    gap = medial_gap;
  } else if (u > 0.2) {
    gap = lateral_gap + (medial_gap - lateral_gap) * (u - 0.2) / 0.675;
  }
  return joint_line_y + edge_drop(u) - gap - condyle(u) - notch(u) + femur_osteophyte(u, osteophyte);
}

geometry::Point2D KneeShape::to_image(geometry::Point2D p) const {
  const Point2D centre{0.5 * image_width_mm, 0.5 * image_height_mm};
  return geometry::RigidTransform::about(centre, rotation).apply({p.x + margin_x, p.y});
}

geometry::Point2D KneeShape::to_knee(geometry::Point2D p) const {
  const Point2D centre{0.5 * image_width_mm, 0.5 * image_height_mm};
  const Point2D q = geometry::RigidTransform::about(centre, -rotation).apply(p);
  return {q.x - margin_x, q.y};
}

std::vector<double> fractal_surface(std::size_t levels, double hurst, std::uint64_t seed) {
  if (levels == 0 || levels > 12) throw InvalidArgument("fractal surface levels must lie in 1..12");
  if (!(hurst > 0.0 && hurst < 1.0)) throw InvalidArgument("Hurst exponent must lie in (0, 1)");
  const std::size_t n = (std::size_t{1} << levels) + 1;
  std::vector<double> g(n * n, 0.0);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto at = [&](std::size_t x, std::size_t y) -> double& { return g[y * n + x]; };
  for (std::size_t y : {std::size_t{0}, n - 1}) {
    for (std::size_t x : {std::size_t{0}, n - 1}) at(x, y) = gauss(rng);
  }
  double scale = 1.0;
  const double decay = std::pow(0.5, hurst);
  for (std::size_t step = n - 1; step > 1; step /= 2) {
    const std::size_t half = step / 2;
    scale *= decay;
    for (std::size_t y = half; y < n; y += step) {
      for (std::size_t x = half; x < n; x += step) {
        const double avg = 0.25 * (at(x - half, y - half) + at(x + half, y - half) + at(x - half, y + half) +
                                   at(x + half, y + half));
        at(x, y) = avg + scale * gauss(rng);
      }
    }
    for (std::size_t y = 0; y < n; y += half) {
      for (std::size_t x = (y / half) % 2 == 0 ? half : 0; x < n; x += step) {
        double sum = 0.0;
        int count = 0;
        if (x >= half) sum += at(x - half, y), ++count;
        if (x + half < n) sum += at(x + half, y), ++count;
        if (y >= half) sum += at(x, y - half), ++count;
        if (y + half < n) sum += at(x, y + half), ++count;
        at(x, y) = sum / count + scale * gauss(rng);
      }
    }
  }
  const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
  double sq = 0.0;
  for (double v : g) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(g.size()));
  for (double& v : g) v = sd > 0 ? (v - mean) / sd : 0.0;
  return g;
}

SynthPlan make_synth_plan(const SynthConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_knees;
  SynthPlan plan;
  plan.labels.assign(n, 0);
  plan.gap_quantile.assign(n, 0.5);
  for (int c = 0; c < 2; ++c) {
    plan.gap_model[c] = TruncatedNormal::calibrate(cfg.medial_gap_mean[c], cfg.medial_gap_std[c], cfg.gap_lower_bound);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng assign_rng(derive_seed({cfg.seed, 0xc1a55u}));
  std::shuffle(order.begin(), order.end(), assign_rng);
  const auto n_oa = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.oa_fraction));
  for (std::size_t k = 0; k < n_oa; ++k) plan.labels[order[k]] = 1;

  // Stratified quantiles: the knees of a class split [0, 1) into equal
  // strata, one per knee in a seeded order, with a uniform draw inside.
  for (int c = 0; c < 2; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (plan.labels[i] == c) members.push_back(i);
    }
    std::vector<std::size_t> strata(members.size());
    std::iota(strata.begin(), strata.end(), 0);
    Rng strata_rng(derive_seed({cfg.seed, 0x57a7u, static_cast<std::uint64_t>(c)}));
    std::shuffle(strata.begin(), strata.end(), strata_rng);
    for (std::size_t k = 0; k < members.size(); ++k) {
      Rng jitter(derive_seed({cfg.seed, 0x9a9u, members[k]}));
      plan.gap_quantile[members[k]] =
          (static_cast<double>(strata[k]) + unit_interval(jitter())) / static_cast<double>(members.size());
    }
  }
  return plan;
}

namespace {

SynthKnee build_knee(const SynthConfig& cfg, const SynthPlan& plan, std::size_t index, bool with_image) {
  if (index >= cfg.n_knees || plan.labels.size() != cfg.n_knees) throw IndexError("knee index out of range");
  SynthKnee k;
  k.knee_id = id_string("K", index);
  k.subject_id = id_string("S", index / 2);
  k.side = index % 2 == 0 ? 'L' : 'R';
  k.label = plan.labels[index];
  k.kl_grade = k.label ? 3 : 0;
  const int c = k.label;

  Rng rng(derive_seed({cfg.seed, index}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  KneeShape& s = k.shape;
  s.width = std::clamp(cfg.tibia_width_mean + cfg.tibia_width_std * gauss(rng), 0.7 * cfg.tibia_width_mean,
                       1.3 * cfg.tibia_width_mean);
  s.lateral_gap = std::max(kMinLateralGap, cfg.lateral_gap_mean[c] + cfg.lateral_gap_std[c] * gauss(rng));
  s.osteophyte = std::min(kMaxOsteophyte, cfg.osteophyte_scale[c] * std::abs(gauss(rng)));
  k.hurst = std::clamp(cfg.hurst_mean[c] + cfg.hurst_std * gauss(rng), 0.05, 0.95);
  const double contrast = cfg.texture_contrast[c] * std::clamp(1.0 + 0.1 * gauss(rng), 0.5, 1.5);
  s.rotation = cfg.max_rotation_deg * uniform(rng) * std::numbers::pi / 180.0;
  s.medial_gap = plan.gap_model[c].quantile(plan.gap_quantile[index]);
  s.margin_x = 6.0;
  s.joint_line_y = 18.0;
  s.image_width_mm = std::ceil((s.width + 2 * s.margin_x) / cfg.spacing_mm) * cfg.spacing_mm;
  s.image_height_mm = std::ceil(kImageHeightMm / cfg.spacing_mm) * cfg.spacing_mm;

  // 74-point template in the knee frame.
  std::vector<Point2D> p(kTemplatePoints);
  std::vector<bool> fixed(kTemplatePoints, false);
  const double w = s.width;
  for (std::size_t i = 0; i < geometry::kFemurPoints; ++i) {
    const double x = femur_x_fraction(i) * w;
    p[kFemurFirst + i] = {x, s.femur_y(x)};
  }
  fixed[kFemurFirst + 10] = true;
  for (std::size_t j = 0; j < geometry::kTibiaPoints; ++j) {
    const double x = tibia_x_fraction(j) * w;
    p[kTibiaFirst + j] = {x, s.tibia_y(x)};
  }
  for (std::size_t j : {0u, 2u, 14u, 16u}) fixed[kTibiaFirst + j] = true;
  const double femur_lat = s.femur_y(femur_x_fraction(0) * w);
  const double femur_med = s.femur_y(femur_x_fraction(12) * w);
  for (std::size_t q = 0; q < 11; ++q) {
    const double t = static_cast<double>(q);
    p[q] = {(0.06 - 0.005 * t) * w, femur_lat - 1.5 - 1.3 * t};
    p[24 + q] = {(1.02 - 0.004 * t) * w, femur_med - 1.5 - 1.3 * t};
    p[35 + q] = {0.006 * t * w, s.tibia_y(0.0) + 1.5 + 1.8 * t};
    p[63 + q] = {(1.0 - 0.006 * t) * w, s.tibia_y(w) + 1.5 + 1.8 * t};
  }
  for (std::size_t q = 0; q < kTemplatePoints; ++q) {
    const double jx = gauss(rng), jy = gauss(rng);  // drawn for every point to keep streams aligned
    if (!fixed[q]) {
      p[q].x += cfg.landmark_jitter_mm * jx;
      p[q].y += cfg.landmark_jitter_mm * jy;
    }
  }
  k.points.reserve(kTemplatePoints);
  for (const auto& q : p) k.points.push_back(s.to_image(q));

  if (!with_image) return k;

  const double sp = cfg.spacing_mm;
  const auto width_px = static_cast<std::size_t>(std::llround(s.image_width_mm / sp));
  const auto height_px = static_cast<std::size_t>(std::llround(s.image_height_mm / sp));
  const auto texture = fractal_surface(kTextureLevels, k.hurst, derive_seed({cfg.seed, index, 0x7eu}));
  const std::size_t tn = (std::size_t{1} << kTextureLevels) + 1;
  auto texture_at = [&](double x_mm, double y_mm) {
    // The texture grid shares the pixel pitch and starts at the knee-frame
    // point (-margin_x, 0).
    const double gx = std::clamp((x_mm + s.margin_x) / sp, 0.0, static_cast<double>(tn - 1));
    const double gy = std::clamp(y_mm / sp, 0.0, static_cast<double>(tn - 1));
    const auto x0 = std::min(static_cast<std::size_t>(gx), tn - 2);
    const auto y0 = std::min(static_cast<std::size_t>(gy), tn - 2);
    const double fx = gx - static_cast<double>(x0), fy = gy - static_cast<double>(y0);
    const double* r0 = texture.data() + y0 * tn + x0;
    const double* r1 = r0 + tn;
    return (1 - fy) * ((1 - fx) * r0[0] + fx * r0[1]) + fy * ((1 - fx) * r1[0] + fx * r1[1]);
  };

  std::vector<double> px(width_px * height_px);
  const double fx_lo = -0.02 * w, fx_hi = 1.06 * w;
  for (std::size_t y = 0; y < height_px; ++y) {
    for (std::size_t x = 0; x < width_px; ++x) {
      const Point2D q = s.to_knee({(static_cast<double>(x) + 0.5) * sp, (static_cast<double>(y) + 0.5) * sp});
      double v = kSoftTissue + kSoftTissueGradient * q.y / s.image_height_mm;
      if (q.x >= 0.0 && q.x <= w && q.y > s.tibia_y(q.x)) {
        v = kTibiaBone + contrast * texture_at(q.x, q.y);
      } else if (q.x >= fx_lo && q.x <= fx_hi &&
                 q.y < s.femur_y(std::clamp(q.x, femur_x_fraction(0) * w, femur_x_fraction(12) * w))) {
        v = kFemurBone + 0.5 * contrast * texture_at(q.x, q.y);
      }
      v += cfg.noise_std * gauss(rng);
      px[y * width_px + x] = std::clamp(std::floor(v + 0.5), 0.0, 65535.0);
    }
  }
  k.image = imaging::RasterImage(width_px, height_px, sp, imaging::BitDepth::k16, std::move(px));
  return k;
}

}  // namespace

SynthKnee synth_knee(const SynthConfig& cfg, const SynthPlan& plan, std::size_t index) {
  return build_knee(cfg, plan, index, true);
}

SynthKnee synth_knee(const SynthConfig& cfg, std::size_t index) { return synth_knee(cfg, make_synth_plan(cfg), index); }

SynthKnee synth_landmarks(const SynthConfig& cfg, const SynthPlan& plan, std::size_t index) {
  return build_knee(cfg, plan, index, false);
}

std::filesystem::path synth_generate(const SynthConfig& cfg, const std::filesystem::path& out_dir) {
  const SynthPlan plan = make_synth_plan(cfg);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  std::filesystem::create_directories(out_dir / "points", ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());

  std::vector<ManifestEntry> entries(cfg.n_knees);
  parallel_for(cfg.n_knees, [&](std::size_t i) {
    const SynthKnee k = synth_knee(cfg, plan, i);
    ManifestEntry& e = entries[i];
    e.image_path = out_dir / "images" / (k.knee_id + ".pgm");
    e.points_path = out_dir / "points" / (k.knee_id + ".pts");
    e.knee_id = k.knee_id;
    e.subject_id = k.subject_id;
    e.side = k.side;
    e.kl_grade = k.kl_grade;
    e.spacing_mm = cfg.spacing_mm;
    write_pgm(e.image_path, k.image);
    write_points(e.points_path, k.points);
  });
  const auto manifest = out_dir / "manifest.csv";
  write_manifest(manifest, entries);
  write_roles(out_dir / "roles.json", geometry::LandmarkRoles::defaults());
  std::ofstream(out_dir / "synth_config.json") << synth_config_json(cfg);
  return manifest;
}

}  // namespace oaknee::io
