#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "oaknee/models/dataset.hpp"
#include "oaknee/models/networks.hpp"
#include "oaknee/models/train.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::eval {

/// Adds i.i.d. N(0, sigma^2) to every entry and clamps the result at 0.
std::vector<double> perturb_descriptor(std::span<const double> js2, double sigma_mm, Rng& rng);

struct NoiseSweepRow {
  double sigma_mm = 0.0;
  std::string model;
  double auc = 0.0;
};

struct NoiseSweepConfig {
  std::vector<double> sigmas{0.0, 1.0, 3.0, 5.0};
  std::vector<models::Arch> models{models::Arch::kJs2Net};
  models::TrainConfig train;
  std::uint64_t seed = 0;
  std::string feature_tag = "js2";
};

/// Seed of the job that trains `model` at noise level `sigma_mm`.
std::uint64_t noise_job_seed(std::uint64_t seed, double sigma_mm, const std::string& model);

/// Copy of `data` with the js2_* columns perturbed sample by sample.
models::Dataset perturb_js2_columns(const models::Dataset& data, double sigma_mm, Rng& rng);

/// For every (sigma, model): perturbs the JS2 columns of train, val and test
/// with the job's own stream, retrains and records the test AUC. Rows come
/// out sigma-major in the order given.
std::vector<NoiseSweepRow> noise_sweep(const models::Dataset& train, const models::Dataset& val,
                                       const models::Dataset& test, const NoiseSweepConfig& cfg);

}  // namespace oaknee::eval
