#include "oaknee/models/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <mutex>
#include <sstream>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "oaknee/error.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/models/logistic.hpp"
#include "oaknee/nn/optim.hpp"

namespace oaknee::models {

namespace {

constexpr std::size_t kInferenceBatch = 64;

bool uses_images(Arch a) { return a == Arch::kTinyCnn || a == Arch::kCombined; }
bool uses_vectors(Arch a) { return a != Arch::kTinyCnn; }

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

TensorRecord vector_record(const std::string& name, const std::vector<double>& v) {
  return {name, DType::kF64, {v.size()}, v};
}

Standardizer standardizer_of(const TrainedModel& model, std::size_t feature_dim) {
  Standardizer st;
  st.mean = model.tensor("feature_mean").values;
  st.scale = model.tensor("feature_std").values;
  if (st.mean.size() != feature_dim || st.scale.size() != feature_dim) {
    throw ShapeError("model was trained on " + std::to_string(st.mean.size()) + " features, data has " +
                     std::to_string(feature_dim));
  }
  return st;
}

void check_inputs(Arch arch, const Dataset& data) {
  data.validate();
  if (uses_images(arch) && !data.empty() && !data.has_patches()) {
    throw InvalidArgument(arch_tag(arch) + " needs ROI patches but the dataset has none");
  }
  if (uses_vectors(arch) && data.feature_dim() == 0) {
    throw InvalidArgument(arch_tag(arch) + " needs a feature vector but the dataset has none");
  }
}

double validation_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  return eval::roc_auc(scores, labels).auc;
}

void echo_config(TrainedModel& m, const TrainConfig& cfg) {
  m.metadata["train.batch"] = std::to_string(cfg.batch_size);
  m.metadata["train.momentum"] = format_double(cfg.momentum);
  m.metadata["train.weight_decay"] = format_double(cfg.weight_decay);
  m.metadata["train.lr0"] = format_double(cfg.lr0);
  m.metadata["train.lr_step"] = std::to_string(cfg.lr_step);
  m.metadata["train.lr_factor"] = format_double(cfg.lr_factor);
  m.metadata["train.epochs"] = std::to_string(cfg.epochs);
  m.metadata["train.seed"] = std::to_string(cfg.seed);
  m.metadata["train.augment"] = cfg.augment ? "1" : "0";
  m.metadata["preprocess.spacing_mm"] = "0.2";
  m.metadata["preprocess.crop"] = "center";
}

TrainResult fit_logistic_model(const Dataset& train, const Dataset& val, const TrainConfig& cfg) {
  const Standardizer st = Standardizer::fit(train);
  std::vector<double> x;
  x.reserve(train.size() * train.feature_dim());
  for (const auto& s : train.samples) {
    const auto z = st.apply(s.features);
    x.insert(x.end(), z.begin(), z.end());
  }
  const double lambda = cfg.l2_lambda < 0 ? 1.0 / static_cast<double>(train.size()) : cfg.l2_lambda;
  const auto labels = train.labels();
  const LogisticModel lr = fit_logistic(x, train.feature_dim(), labels, lambda, cfg.lr_max_iter, cfg.lr_tol);

  TrainResult r;
  r.model.arch = Arch::kLogistic;
  r.model.tensors.push_back(vector_record("weight", lr.weights));
  r.model.tensors.push_back(vector_record("bias", {lr.bias}));
  r.model.tensors.push_back(vector_record("feature_mean", st.mean));
  r.model.tensors.push_back(vector_record("feature_std", st.scale));
  r.model.metadata["lr.l2_lambda"] = format_double(lambda);
  r.model.metadata["lr.iterations"] = std::to_string(lr.iterations);
  r.model.metadata["preprocess.standardize"] = "train-zscore";

  EpochRecord rec;
  rec.train_loss = lr.objective_trace.back();
  rec.val_auc = validation_auc(predict_scores(r.model, val), val.labels());
  r.history.push_back(rec);
  r.best_val_auc = rec.val_auc;
  return r;
}

TrainResult fit_network(Arch arch, const Dataset& train, const Dataset& val, const TrainConfig& cfg) {
  if (cfg.batch_size < 2) throw InvalidArgument("batch size must be at least 2");
  NetConfig net_cfg = cfg.net.value_or(default_config(arch, train.feature_dim(), cfg.seed));
  net_cfg.vector_dim = train.feature_dim();
  auto net = make_network<float>(arch, net_cfg);
  const Standardizer st = uses_vectors(arch) ? Standardizer::fit(train) : Standardizer{};
  auto params = net->params();
  auto buffers = net->buffers();

  nn::SgdState<float> opt;
  opt.momentum = cfg.momentum;
  opt.weight_decay = cfg.weight_decay;

  const std::vector<int> val_labels = val.labels();
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult r;
  std::vector<nn::Tensor<float>> best_params, best_buffers;
  bool have_best = false;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    opt.lr = nn::step_learning_rate(cfg.lr0, epoch, cfg.lr_step, cfg.lr_factor);
    Rng shuffle_rng(derive_seed({cfg.seed, 0x5u, epoch}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      if (count < 2) break;  // batch statistics need two samples
      const std::span<const std::size_t> idx(order.data() + start, count);
      const Batch<float> batch =
          make_batch(train, idx, arch, st, imaging::PatchMode::kTrain, derive_seed({cfg.seed, 0xc0u, epoch}),
                     cfg.augment ? &cfg.augment_params : nullptr);
      std::vector<int> labels(count);
      for (std::size_t i = 0; i < count; ++i) labels[i] = train.samples[idx[i]].label;
      const auto logits = net->forward(batch, Mode::kTrain);
      const auto loss = nn::softmax_cross_entropy(logits, labels);
      net->backward(loss.grad);
      nn::sgd_momentum_step(params, opt);
      loss_sum += loss.loss * static_cast<double>(count);
      seen += count;
    }
    if (seen == 0) throw EmptyDataset("training split has fewer than 2 samples");

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = opt.lr;
    rec.train_loss = loss_sum / static_cast<double>(seen);
    rec.val_auc = validation_auc(network_scores(*net, val, st), val_labels);
    r.history.push_back(rec);
    if (cfg.on_epoch) cfg.on_epoch(rec);

    if (!have_best || rec.val_auc > r.best_val_auc) {
      have_best = true;
      r.best_val_auc = rec.val_auc;
      r.best_epoch = epoch;
      best_params.clear();
      best_buffers.clear();
      for (const auto& p : params) best_params.push_back(*p.value);
      for (const auto& b : buffers) best_buffers.push_back(*b.value);
    }
  }

  TrainedModel& m = r.model;
  m.arch = arch;
  store_net_config(m, net_cfg);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& t = have_best ? best_params[i] : *params[i].value;
    m.tensors.push_back({params[i].name, DType::kF32, t.shape(), {t.values().begin(), t.values().end()}});
  }
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    const auto& t = have_best ? best_buffers[i] : *buffers[i].value;
    m.tensors.push_back({buffers[i].name, DType::kF32, t.shape(), {t.values().begin(), t.values().end()}});
  }
  if (uses_vectors(arch)) {
    m.tensors.push_back(vector_record("feature_mean", st.mean));
    m.tensors.push_back(vector_record("feature_std", st.scale));
    m.metadata["preprocess.standardize"] = "train-zscore";
  }
  m.metadata["train.best_epoch"] = std::to_string(r.best_epoch);
  return r;
}

}  // namespace

Batch<float> make_batch(const Dataset& data, std::span<const std::size_t> indices, Arch arch,
                        const Standardizer& standardizer, imaging::PatchMode mode, std::uint64_t seed,
                        const imaging::AugmentParams* augment) {
  const std::size_t n = indices.size();
  Batch<float> batch;
  if (uses_images(arch)) {
    const std::size_t side = imaging::kCropSide;
    batch.images = nn::Tensor<float>({n, 1, side, side});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = indices[i];
      const auto offset = imaging::crop_offset(mode, derive_seed({seed, k}));
      nn::Tensor<float> crop = imaging::crop_patch(data.samples.at(k).patch, offset);
      if (augment) {
        Rng rng(derive_seed({seed, k, 0xa6u}));
        crop = imaging::augment(crop, *augment, rng);
      }
      std::copy(crop.values().begin(), crop.values().end(), batch.images.data() + i * side * side);
    }
  }
  if (uses_vectors(arch)) {
    const std::size_t d = data.feature_dim();
    batch.vectors = nn::Tensor<float>({n, d});
    for (std::size_t i = 0; i < n; ++i) {
      const auto z = standardizer.apply(data.samples.at(indices[i]).features);
      for (std::size_t j = 0; j < d; ++j) batch.vectors[i * d + j] = static_cast<float>(z[j]);
    }
  }
  return batch;
}

std::vector<double> network_scores(Network<float>& net, const Dataset& data, const Standardizer& standardizer) {
  std::vector<double> scores;
  scores.reserve(data.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += kInferenceBatch) {
    const std::size_t count = std::min(kInferenceBatch, data.size() - start);
    idx.resize(count);
    std::iota(idx.begin(), idx.end(), start);
    const auto batch = make_batch(data, idx, net.arch(), standardizer, imaging::PatchMode::kEval, 0);
    const auto p = nn::positive_probability(net.forward(batch, Mode::kEval));
    scores.insert(scores.end(), p.begin(), p.end());
  }
  return scores;
}

TrainResult fit_model(Arch arch, const Dataset& train, const Dataset& val, const TrainConfig& cfg,
                      const std::string& feature_tag) {
  if (train.empty()) throw EmptyDataset("training split is empty");
  if (val.empty()) throw EmptyDataset("validation split is empty");
  if (train.feature_dim() != val.feature_dim()) throw ShapeError("train and validation feature dims differ");
  check_inputs(arch, train);
  check_inputs(arch, val);
#ifdef __GLIBC__
  // Activation buffers are freed and reallocated every batch; keeping them
  // in the heap avoids fresh zeroed pages from mmap on each allocation.
  static std::once_flag tuned;
  std::call_once(tuned, [] {
    mallopt(M_MMAP_THRESHOLD, 1 << 30);
    mallopt(M_TRIM_THRESHOLD, 1 << 30);
  });
#endif
  TrainResult r = arch == Arch::kLogistic ? fit_logistic_model(train, val, cfg) : fit_network(arch, train, val, cfg);
  r.model.feature_tag = feature_tag;
  echo_config(r.model, cfg);
  return r;
}

std::vector<double> predict_scores(const TrainedModel& model, const Dataset& data) {
  check_inputs(model.arch, data);
  if (model.arch == Arch::kLogistic) {
    const Standardizer st = standardizer_of(model, data.feature_dim());
    LogisticModel lr;
    lr.weights = model.tensor("weight").values;
    lr.bias = model.tensor("bias").values.at(0);
    std::vector<double> scores;
    scores.reserve(data.size());
    for (const auto& s : data.samples) scores.push_back(lr.predict(st.apply(s.features)));
    return scores;
  }
  auto net = restore_network(model);
  const Standardizer st = uses_vectors(model.arch) ? standardizer_of(model, data.feature_dim()) : Standardizer{};
  return network_scores(*net, data, st);
}

}  // namespace oaknee::models
