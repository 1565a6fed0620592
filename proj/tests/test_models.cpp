#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oaknee/error.hpp"
#include "oaknee/eval/roc.hpp"
#include "oaknee/models/logistic.hpp"
#include "oaknee/models/networks.hpp"
#include "oaknee/models/train.hpp"
#include "oaknee/nn/kernels.hpp"
#include "oaknee/nn/optim.hpp"

using namespace oaknee;
using namespace oaknee::models;

namespace {

// Two Gaussian classes in `d` dimensions whose means differ by `shift` on
// every coordinate; shift 3 and above is separable in practice.
Dataset vector_dataset(std::size_t n, std::size_t d, double shift, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Dataset data;
  for (std::size_t j = 0; j < d; ++j) data.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.knee_id = "k" + std::to_string(i);
    s.subject_id = "s" + std::to_string(i);
    s.label = static_cast<int>(i % 2);
    for (std::size_t j = 0; j < d; ++j) s.features.push_back(5.0 + g(rng) + (s.label ? -shift : 0.0));
    data.samples.push_back(std::move(s));
  }
  return data;
}

// Patches whose class is a bright or dark disc at the centre.
Dataset patch_dataset(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  Dataset data;
  const std::size_t side = imaging::kRescaledSide;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.knee_id = "p" + std::to_string(i);
    s.subject_id = s.knee_id;
    s.label = static_cast<int>(i % 2);
    s.patch.resize(side * side);
    for (std::size_t y = 0; y < side; ++y) {
      for (std::size_t x = 0; x < side; ++x) {
        const double r = std::hypot(x - 27.5, y - 27.5);
        const double disc = r < 12 ? (s.label ? 0.8 : 0.2) : 0.5;
        s.patch[y * side + x] = static_cast<float>(disc + u(rng));
      }
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

TrainConfig quick_config(std::size_t epochs, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.batch_size = 16;
  return cfg;
}

template <typename T>
void zero_params(Network<T>& net) {
  for (auto& p : net.params()) p.value->fill(T(0));
}

}  // namespace

TEST(TinyCnn, PooledShapes) {
  NetConfig cfg;
  TinyCnn<float> net(cfg);
  nn::Tensor<float> x({8, 1, 48, 48}, 0.5f);
  const auto shapes = net.trunk().trace_shapes(x, Mode::kEval);
  // Conv, BN, pool, ReLU per block, then flatten.
  ASSERT_EQ(shapes.size(), 13u);
  EXPECT_EQ(shapes[2], (nn::Shape{8, 32, 24, 24}));
  EXPECT_EQ(shapes[6], (nn::Shape{8, 64, 12, 12}));
  EXPECT_EQ(shapes[10], (nn::Shape{8, 128, 6, 6}));
  EXPECT_EQ(shapes.back(), (nn::Shape{8, 4608}));
  EXPECT_EQ(net.forward({x, {}}, Mode::kEval).shape(), (nn::Shape{8, 2}));
  EXPECT_EQ(trunk_output_size(cfg), 4608u);
}

TEST(TinyCnn, ParameterCountClosedForm) {
  TinyCnn<float> net(NetConfig{});
  const std::size_t conv_weights = (1 * 32 + 32 * 64 + 64 * 128) * 9;
  const std::size_t conv_biases = 32 + 64 + 128;
  const std::size_t bn_affine = 2 * (32 + 64 + 128);
  const std::size_t head = 4608 * 256 + 256 + 256 * 2 + 2;
  const std::size_t total = conv_weights + conv_biases + bn_affine + head;
  EXPECT_EQ(total, 1273538u);
  EXPECT_EQ(nn::parameter_count(net.params()), total);
}

TEST(TinyCnn, RejectsWrongRank) {
  TinyCnn<float> net(NetConfig{});
  EXPECT_THROW(net.forward({nn::Tensor<float>({2, 48, 48}), {}}, Mode::kEval), ShapeError);
  EXPECT_THROW(net.forward({nn::Tensor<float>({2, 3, 48, 48}), {}}, Mode::kEval), ShapeError);
}

TEST(Js2Net, ZeroWeightsGiveOutputBias) {
  NetConfig cfg;
  Js2Net<double> net(cfg);
  zero_params(net);
  auto params = net.params();
  auto& out_bias = *params.back().value;
  ASSERT_EQ(out_bias.size(), 2u);
  out_bias[0] = 0.25;
  out_bias[1] = -1.5;
  nn::Tensor<double> x({3, 221});
  const auto logits = net.forward({{}, x}, Mode::kEval);
  ASSERT_EQ(logits.shape(), (nn::Shape{3, 2}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(logits[2 * i], 0.25);
    EXPECT_EQ(logits[2 * i + 1], -1.5);
  }
}

TEST(Js2Net, InputLengthIsChecked) {
  Js2Net<float> net(NetConfig{});
  EXPECT_THROW(net.forward({{}, nn::Tensor<float>({2, 220})}, Mode::kEval), ShapeError);
}

TEST(CombinedNet, FusionLength) {
  CombinedNet<float> net(NetConfig{});
  EXPECT_EQ(net.fusion_size(), 4608u + 221u);
  EXPECT_EQ(net.fusion_size(), 4829u);
  const auto logits = net.forward({nn::Tensor<float>({2, 1, 48, 48}, 0.3f), nn::Tensor<float>({2, 221}, 1.0f)},
                                  Mode::kEval);
  EXPECT_EQ(logits.shape(), (nn::Shape{2, 2}));
  for (auto v : logits.values()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(net.forward({nn::Tensor<float>({2, 1, 48, 48}), nn::Tensor<float>({2, 200})}, Mode::kEval),
               ShapeError);
}

TEST(Networks, DefaultDropout) {
  EXPECT_DOUBLE_EQ(default_config(Arch::kTinyCnn, 0, 0).dropout, 0.5);
  EXPECT_DOUBLE_EQ(default_config(Arch::kJs2Net, 221, 0).dropout, 0.5);
  EXPECT_DOUBLE_EQ(default_config(Arch::kCombined, 221, 0).dropout, 0.3);
  for (const char* tag : {"lr", "js2-nn", "cnn", "combined"}) EXPECT_EQ(arch_tag(parse_arch(tag)), tag);
  EXPECT_THROW(parse_arch("resnet"), InvalidArgument);
}

TEST(Networks, EvalForwardIsDeterministic) {
  auto net = make_network<float>(Arch::kCombined, NetConfig{});
  const Batch<float> b{nn::Tensor<float>({2, 1, 48, 48}, 0.1f), nn::Tensor<float>({2, 221}, 0.5f)};
  EXPECT_EQ(net->forward(b, Mode::kEval), net->forward(b, Mode::kEval));
}

// Fixed batch of 64, full-batch SGD with momentum at lr 0.01: the loss must
// drop at each of the first five steps for at least 18 of 20 seeds.
TEST(Training, FullBatchLossDecreases) {
  const Dataset data = vector_dataset(64, 221, 0.3, 5);
  const Standardizer st = Standardizer::fit(data);
  std::vector<std::size_t> idx(64);
  std::iota(idx.begin(), idx.end(), 0);
  const auto batch = make_batch(data, idx, Arch::kJs2Net, st, imaging::PatchMode::kEval, 0);
  const auto labels = data.labels();
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    NetConfig cfg;
    cfg.seed = seed;
    Js2Net<float> net(cfg);
    net.freeze_randomness(true);
    nn::SgdState<float> opt;
    auto params = net.params();
    double prev = 0.0;
    bool decreasing = true;
    for (int it = 0; it <= 5; ++it) {
      for (auto& p : params) p.grad->fill(0.0f);
      const auto loss = nn::softmax_cross_entropy(net.forward(batch, Mode::kTrain), labels);
      if (it > 0 && !(loss.loss < prev)) decreasing = false;
      prev = loss.loss;
      net.backward(loss.grad);
      nn::sgd_momentum_step(params, opt);
    }
    ok += decreasing;
  }
  EXPECT_GE(ok, 18);
}

TEST(Training, SeparableSetReachesHighValidationAuc) {
  const Dataset train = vector_dataset(400, 221, 0.5, 11);
  const Dataset val = vector_dataset(100, 221, 0.5, 12);
  const auto r = fit_model(Arch::kJs2Net, train, val, quick_config(30, 3), "js2");
  EXPECT_GE(r.best_val_auc, 0.99);
  EXPECT_EQ(r.history.size(), 30u);
  EXPECT_EQ(r.model.feature_tag, "js2");
}

TEST(Training, HistoryShowsStepSchedule) {
  const Dataset train = vector_dataset(64, 8, 1.0, 1);
  const Dataset val = vector_dataset(32, 8, 1.0, 2);
  const auto r = fit_model(Arch::kJs2Net, train, val, quick_config(17, 0));
  ASSERT_EQ(r.history.size(), 17u);
  EXPECT_DOUBLE_EQ(r.history[0].lr, 0.01);
  EXPECT_DOUBLE_EQ(r.history[7].lr, 0.01);
  EXPECT_NEAR(r.history[8].lr, 0.001, 1e-15);
  EXPECT_NEAR(r.history[16].lr, 0.0001, 1e-15);
  for (std::size_t e = 0; e < r.history.size(); ++e) EXPECT_EQ(r.history[e].epoch, e);
}

TEST(Training, SameSeedIsBitwiseReproducible) {
  const Dataset train = patch_dataset(32, 4);
  const Dataset val = patch_dataset(16, 5);
  TrainConfig cfg = quick_config(2, 9);
  cfg.net = NetConfig{48, {4, 4, 4}, 8, 0.5, 0, 9};
  const auto a = fit_model(Arch::kTinyCnn, train, val, cfg);
  const auto b = fit_model(Arch::kTinyCnn, train, val, cfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    EXPECT_EQ(a.history[e].train_loss, b.history[e].train_loss);
    EXPECT_EQ(a.history[e].val_auc, b.history[e].val_auc);
  }
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(predict_scores(a.model, val), predict_scores(a.model, val));
}

TEST(Training, BestEpochNotWorseThanFirst) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset train = vector_dataset(80, 10, 0.3, 100 + seed);
    const Dataset val = vector_dataset(40, 10, 0.3, 200 + seed);
    const auto r = fit_model(Arch::kJs2Net, train, val, quick_config(6, seed));
    EXPECT_GE(r.best_val_auc, r.history.front().val_auc);
    EXPECT_EQ(r.history.at(r.best_epoch).val_auc, r.best_val_auc);
    for (const auto& h : r.history) EXPECT_LE(h.val_auc, r.best_val_auc);
  }
}

TEST(Training, EmptySplitsThrow) {
  const Dataset data = vector_dataset(20, 4, 1.0, 1);
  Dataset empty;
  empty.feature_names = data.feature_names;
  EXPECT_THROW(fit_model(Arch::kLogistic, empty, data, quick_config(1, 0)), EmptyDataset);
  EXPECT_THROW(fit_model(Arch::kJs2Net, data, empty, quick_config(1, 0)), EmptyDataset);
}

TEST(Training, ImageFamiliesNeedPatches) {
  const Dataset data = vector_dataset(20, 4, 1.0, 1);
  EXPECT_THROW(fit_model(Arch::kTinyCnn, data, data, quick_config(1, 0)), InvalidArgument);
}

TEST(PredictScores, ZeroLogisticGivesOneHalf) {
  const Dataset data = vector_dataset(30, 5, 1.0, 3);
  auto r = fit_model(Arch::kLogistic, data, data, quick_config(1, 0));
  for (auto& t : r.model.tensors) {
    if (t.name == "weight" || t.name == "bias") std::fill(t.values.begin(), t.values.end(), 0.0);
  }
  for (double s : predict_scores(r.model, data)) EXPECT_EQ(s, 0.5);
}

TEST(PredictScores, RangeAndDimensionCheck) {
  const Dataset data = vector_dataset(40, 6, 1.0, 3);
  const auto r = fit_model(Arch::kJs2Net, data, data, quick_config(2, 0));
  for (double s : predict_scores(r.model, data)) {
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
  EXPECT_THROW(predict_scores(r.model, vector_dataset(10, 7, 1.0, 4)), ShapeError);
  const auto lr = fit_model(Arch::kLogistic, data, data, quick_config(1, 0));
  EXPECT_THROW(predict_scores(lr.model, vector_dataset(10, 5, 1.0, 4)), ShapeError);
}

TEST(Logistic, SeparatedOneDimensional) {
  const std::vector<double> x{-3, -2, -1, 1, 2, 3};
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto m = fit_logistic(x, 1, y, 1e-3);
  std::vector<double> scores;
  for (double v : x) scores.push_back(m.predict(std::span<const double>(&v, 1)));
  EXPECT_EQ(eval::roc_auc(scores, y).auc, 1.0);
  EXPECT_GT(m.weights[0], 0.0);
}

TEST(Logistic, PenaltyShrinksWeights) {
  const Dataset data = vector_dataset(100, 4, 0.8, 8);
  const auto x = data.feature_matrix();
  const auto y = data.labels();
  double prev = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const auto m = fit_logistic(x, 4, y, lambda);
    double norm = 0.0;
    for (double w : m.weights) norm += w * w;
    EXPECT_LE(std::sqrt(norm), prev + 1e-9);
    prev = std::sqrt(norm);
  }
}

TEST(Logistic, ObjectiveTraceNonIncreasing) {
  const Dataset data = vector_dataset(60, 3, 0.5, 21);
  const auto m = fit_logistic(data.feature_matrix(), 3, data.labels(), 0.01);
  ASSERT_GE(m.objective_trace.size(), 2u);
  EXPECT_NEAR(m.objective_trace.front(), std::log(2.0), 1e-12);
  for (std::size_t i = 1; i < m.objective_trace.size(); ++i) {
    EXPECT_LE(m.objective_trace[i], m.objective_trace[i - 1]);
  }
}

// Six samples, one feature: Newton's method on (w, b) is an independent
// convex oracle; a grid confirms nothing lies below the fitted optimum.
TEST(Logistic, SixSampleConvexOracle) {
  const std::vector<double> x{-1.2, -0.4, 0.3, 0.1, 0.9, 1.5};
  const std::vector<int> y{0, 0, 1, 0, 1, 1};
  const double lambda = 0.1;
  const auto m = fit_logistic(x, 1, y, lambda, 100000, 1e-10);

  double w = 0.0, b = 0.0;
  for (int it = 0; it < 50; ++it) {
    double gw = lambda * w, gb = 0.0, hww = lambda, hwb = 0.0, hbb = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double p = 1.0 / (1.0 + std::exp(-(w * x[i] + b)));
      const double r = (p - y[i]) / 6.0, s = p * (1.0 - p) / 6.0;
      gw += r * x[i];
      gb += r;
      hww += s * x[i] * x[i];
      hwb += s * x[i];
      hbb += s;
    }
    const double det = hww * hbb - hwb * hwb;
    w -= (hbb * gw - hwb * gb) / det;
    b -= (hww * gb - hwb * gw) / det;
  }
  const double oracle = logistic_objective(std::vector<double>{w}, b, x, 1, y, lambda);
  const double fitted = logistic_objective(m.weights, m.bias, x, 1, y, lambda);
  EXPECT_NEAR(fitted, oracle, 1e-6);
  EXPECT_NEAR(m.weights[0], w, 1e-4);
  for (double gw = -5; gw <= 5; gw += 0.05) {
    for (double gb = -5; gb <= 5; gb += 0.05) {
      EXPECT_GE(logistic_objective(std::vector<double>{gw}, gb, x, 1, y, lambda), fitted - 1e-9);
    }
  }
}

TEST(Logistic, SingleClassThrows) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(fit_logistic(x, 1, std::vector<int>{1, 1, 1}, 0.1), DegenerateLabels);
}

TEST(Standardizer, ZScoreAndConstantColumns) {
  Dataset d;
  d.feature_names = {"a", "b"};
  for (double v : {1.0, 2.0, 3.0}) d.samples.push_back({"k", "s", 0, {}, {v, 7.0}});
  const auto st = Standardizer::fit(d);
  EXPECT_DOUBLE_EQ(st.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(st.scale[0], std::sqrt(2.0 / 3.0));
  EXPECT_DOUBLE_EQ(st.scale[1], 1.0);
  const auto z = st.apply(std::vector<double>{3.0, 7.0});
  EXPECT_NEAR(z[0], 1.0 / std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_EQ(z[1], 0.0);
}

TEST(Dataset, ValidateCatchesRaggedFeatures) {
  Dataset d = vector_dataset(4, 3, 1.0, 0);
  EXPECT_NO_THROW(d.validate());
  d.samples[2].features.pop_back();
  EXPECT_THROW(d.validate(), ShapeError);
}
