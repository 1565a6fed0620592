#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "oaknee/imaging/imaging.hpp"
#include "oaknee/models/dataset.hpp"
#include "oaknee/models/trained_model.hpp"

namespace oaknee::models {

struct EpochRecord {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_auc = 0.0;
};

struct TrainConfig {
  std::size_t batch_size = 64;
  double momentum = 0.9;
  double weight_decay = 0.0;
  double lr0 = 0.01;
  std::size_t lr_step = 8;
  double lr_factor = 0.1;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool augment = false;
  imaging::AugmentParams augment_params{5.0, 0.9, 1.1, 0.05};
  /// Logistic regression penalty; negative selects 1 / n_train.
  double l2_lambda = -1.0;
  std::size_t lr_max_iter = 10000;
  double lr_tol = 1e-6;
  /// Replaces the default network sizes (and dropout) when set.
  std::optional<NetConfig> net;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_auc = 0.0;
};

/// Trains one model family. Neural families run `epochs` epochs of shuffled
/// mini-batch SGD with the step schedule and keep the weights of the epoch
/// with the highest validation AUC (earliest on ties). Logistic regression
/// is fit once on standardized features. Throws EmptyDataset for an empty
/// split.
TrainResult fit_model(Arch arch, const Dataset& train, const Dataset& val, const TrainConfig& cfg,
                      const std::string& feature_tag = "");

/// Class-1 probability per sample, in [0, 1].
std::vector<double> predict_scores(const TrainedModel& model, const Dataset& data);

/// Class-1 probability from a live network in eval mode, using the eval crop.
std::vector<double> network_scores(Network<float>& net, const Dataset& data, const Standardizer& standardizer);

/// Assembles an eval- or train-mode network input for the given samples.
Batch<float> make_batch(const Dataset& data, std::span<const std::size_t> indices, Arch arch,
                        const Standardizer& standardizer, imaging::PatchMode mode, std::uint64_t seed,
                        const imaging::AugmentParams* augment = nullptr);

}  // namespace oaknee::models
