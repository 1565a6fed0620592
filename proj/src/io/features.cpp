#include "oaknee/io/features.hpp"

#include <algorithm>
#include <sstream>

#include "oaknee/error.hpp"
#include "oaknee/io/pgm.hpp"
#include "oaknee/io/points.hpp"
#include "oaknee/parallel.hpp"

namespace oaknee::io {

PreparedKnee preprocess_knee(const imaging::RasterImage& image, const std::vector<geometry::Point2D>& points,
                             const geometry::LandmarkRoles& roles) {
  geometry::LandmarkSet raw(points, roles);
  imaging::RasterImage img = image.depth() == imaging::BitDepth::k16 ? imaging::normalize_intensity(image) : image;
  img = imaging::resample(img, kWorkingSpacing);
  auto aligned = geometry::align_to_plateau(raw);
  const auto [a, b] = raw.plateau_points();
  const geometry::Point2D mid{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
  const double angle = aligned.transform.rotation;
  if (angle != 0.0) img = imaging::rotate_image(img, angle, imaging::to_pixel(mid, img.spacing()));
  return {std::move(img), std::move(aligned.landmarks), angle};
}

FeatureSpec FeatureSpec::parse(const std::string& tags) {
  FeatureSpec s;
  std::stringstream ss(tags);
  std::string tag;
  bool any = false;
  while (std::getline(ss, tag, ',')) {
    if (tag == "js2") {
      s.js2 = true;
    } else if (tag == "jsw") {
      s.jsw = true;
    } else if (tag == "minjsw") {
      s.minjsw = true;
    } else if (tag == "lbp") {
      s.lbp = true;
    } else if (tag == "fd") {
      s.fd = true;
    } else if (tag == "roi") {
      s.roi = true;
    } else {
      throw InvalidArgument("unknown feature tag '" + tag + "' (expected js2, jsw, minjsw, lbp, fd, roi)");
    }
    any = true;
  }
  if (!any) throw InvalidArgument("empty feature tag list");
  if (s.jsw && s.minjsw) throw InvalidArgument("jsw already includes minjsw");
  return s;
}

std::string FeatureSpec::tag() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(js2, "js2");
  add(jsw, "jsw");
  add(minjsw, "minjsw");
  add(lbp, "lbp");
  add(fd, "fd");
  add(roi, "roi");
  return out;
}

std::vector<std::string> FeatureSpec::names() const {
  std::vector<std::string> n;
  if (js2) {
    for (std::size_t k = 0; k < geometry::kJs2Length; ++k) n.push_back("js2_" + std::to_string(k));
  }
  if (jsw) n.insert(n.end(), {"min_jsw", "med_fjsw", "lat_fjsw"});
  if (minjsw) n.push_back("min_jsw");
  if (lbp) {
    for (std::size_t k = 0; k < texture::LbpConfig{}.neighbors + 2; ++k) n.push_back("lbp_" + std::to_string(k));
  }
  if (fd) n.push_back("fd");
  return n;
}

KneeDescriptors describe_knee(const PreparedKnee& knee, const FeatureSpec& spec) {
  KneeDescriptors d;
  d.js2 = geometry::compute_js2(knee.landmarks);
  if (spec.jsw || spec.minjsw) d.jsw = geometry::measure_jsw(knee.landmarks);
  if (spec.needs_roi()) {
    d.roi = imaging::extract_medial_roi(knee.image, knee.landmarks);
    if (spec.lbp) d.texture.lbp_hist = texture::lbp_histogram(d.roi.patch);
    if (spec.fd) d.texture.fd = texture::fractal_dimension(d.roi.patch);
  }
  return d;
}

std::vector<double> feature_vector(const KneeDescriptors& d, const FeatureSpec& spec) {
  std::vector<double> v;
  if (spec.js2) v.insert(v.end(), d.js2.begin(), d.js2.end());
  if (spec.jsw) v.insert(v.end(), {d.jsw.min_jsw, d.jsw.med_fjsw, d.jsw.lat_fjsw});
  if (spec.minjsw) v.push_back(d.jsw.min_jsw);
  if (spec.lbp) v.insert(v.end(), d.texture.lbp_hist.begin(), d.texture.lbp_hist.end());
  if (spec.fd) v.push_back(d.texture.fd);
  return v;
}

models::Dataset build_dataset(std::size_t count, const std::function<KneeInput(std::size_t)>& load,
                              const FeatureSpec& spec, const geometry::LandmarkRoles& roles) {
  models::Dataset data;
  data.feature_names = spec.names();
  data.samples.resize(count);
  parallel_for(count, [&](std::size_t i) {
    KneeInput in = load(i);
    models::Sample& s = data.samples[i];
    const PreparedKnee knee = preprocess_knee(in.image, in.points, roles);
    const KneeDescriptors d = describe_knee(knee, spec);
    s.features = feature_vector(d, spec);
    if (spec.roi) s.patch = imaging::rescale_patch(d.roi.patch);
    s.knee_id = std::move(in.knee_id);
    s.subject_id = std::move(in.subject_id);
    s.label = in.label;
  });
  data.validate();
  return data;
}

models::Dataset select_features(const models::Dataset& data, const FeatureSpec& spec) {
  std::vector<std::size_t> cols;
  for (const auto& name : spec.names()) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
    if (it == data.feature_names.end()) throw InvalidArgument("dataset has no feature column '" + name + "'");
    cols.push_back(static_cast<std::size_t>(it - data.feature_names.begin()));
  }
  if (spec.roi && !data.has_patches()) throw InvalidArgument("dataset has no ROI patches");
  models::Dataset out;
  out.feature_names = spec.names();
  out.samples.reserve(data.size());
  for (const auto& s : data.samples) {
    models::Sample t;
    t.knee_id = s.knee_id;
    t.subject_id = s.subject_id;
    t.label = s.label;
    if (spec.roi) t.patch = s.patch;
    t.features.reserve(cols.size());
    for (std::size_t c : cols) t.features.push_back(s.features[c]);
    out.samples.push_back(std::move(t));
  }
  return out;
}

std::pair<models::Dataset, models::Dataset> split_train_val(const models::Dataset& data, std::uint64_t split_seed,
                                                            double val_fraction) {
  models::Dataset train, val;
  train.feature_names = val.feature_names = data.feature_names;
  for (const auto& s : data.samples) {
    (is_validation_subject(s.subject_id, split_seed, val_fraction) ? val : train).samples.push_back(s);
  }
  return {std::move(train), std::move(val)};
}

models::Dataset synth_dataset(const SynthConfig& cfg, const FeatureSpec& spec) {
  const SynthPlan plan = make_synth_plan(cfg);
  return build_dataset(
      cfg.n_knees,
      [&](std::size_t i) {
        SynthKnee k = synth_knee(cfg, plan, i);
        return KneeInput{k.knee_id, k.subject_id, k.label, std::move(k.image), std::move(k.points)};
      },
      spec, geometry::LandmarkRoles::defaults());
}

KneeInput load_knee(const ManifestEntry& entry) {
  KneeInput in;
  in.knee_id = entry.knee_id;
  in.subject_id = entry.subject_id;
  in.label = entry.label();
  in.image = read_pgm(entry.image_path, entry.spacing_mm);
  in.points = read_points(entry.points_path);
  return in;
}

models::Dataset build_dataset(const std::vector<ManifestEntry>& entries, const FeatureSpec& spec,
                              const geometry::LandmarkRoles& roles) {
  return build_dataset(
      entries.size(), [&](std::size_t i) { return load_knee(entries[i]); }, spec, roles);
}

}  // namespace oaknee::io
