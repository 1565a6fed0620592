#include "oaknee/eval/robustness.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "oaknee/error.hpp"
#include "oaknee/eval/roc.hpp"

namespace oaknee::eval {

std::vector<double> perturb_descriptor(std::span<const double> js2, double sigma_mm, Rng& rng) {
  if (!(sigma_mm >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  std::vector<double> out(js2.begin(), js2.end());
  if (sigma_mm == 0.0) return out;
  std::normal_distribution<double> noise(0.0, sigma_mm);
  for (double& v : out) v = std::max(0.0, v + noise(rng));
  return out;
}

std::uint64_t noise_job_seed(std::uint64_t seed, double sigma_mm, const std::string& model) {
  return derive_seed({seed, std::bit_cast<std::uint64_t>(sigma_mm), fnv1a64(model)});
}

models::Dataset perturb_js2_columns(const models::Dataset& data, double sigma_mm, Rng& rng) {
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    if (data.feature_names[j].rfind("js2_", 0) == 0) cols.push_back(j);
  }
  if (cols.empty()) throw InvalidArgument("dataset has no js2 columns to perturb");
  models::Dataset out = data;
  std::vector<double> buf(cols.size());
  for (auto& s : out.samples) {
    for (std::size_t c = 0; c < cols.size(); ++c) buf[c] = s.features[cols[c]];
    const auto noisy = perturb_descriptor(buf, sigma_mm, rng);
    for (std::size_t c = 0; c < cols.size(); ++c) s.features[cols[c]] = noisy[c];
  }
  return out;
}

std::vector<NoiseSweepRow> noise_sweep(const models::Dataset& train, const models::Dataset& val,
                                       const models::Dataset& test, const NoiseSweepConfig& cfg) {
  if (cfg.sigmas.empty() || cfg.models.empty()) throw InvalidArgument("noise sweep needs sigmas and models");
  for (double s : cfg.sigmas) {
    if (!(s >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
  }
  std::vector<NoiseSweepRow> rows;
  for (double sigma : cfg.sigmas) {
    for (models::Arch arch : cfg.models) {
      const std::string tag = models::arch_tag(arch);
      Rng rng(noise_job_seed(cfg.seed, sigma, tag));
      const auto tr = perturb_js2_columns(train, sigma, rng);
      const auto va = perturb_js2_columns(val, sigma, rng);
      const auto te = perturb_js2_columns(test, sigma, rng);
      const auto result = models::fit_model(arch, tr, va, cfg.train, cfg.feature_tag);
      const auto scores = models::predict_scores(result.model, te);
      rows.push_back({sigma, tag, roc_auc(scores, te.labels()).auc});
    }
  }
  return rows;
}

}  // namespace oaknee::eval
