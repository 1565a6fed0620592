#include "oaknee/models/gradcheck_suite.hpp"

#include <algorithm>
#include <functional>
#include <memory>

#include "oaknee/nn/kernels.hpp"

namespace oaknee::models {

namespace {

using nn::GradCheckOptions;
using nn::GradCheckReport;
using nn::Shape;
using nn::Tensor;

constexpr double kTight = 1e-5;
constexpr double kLoose = 1e-4;

struct Case {
  std::string name;
  double tolerance;
  std::function<GradCheckReport(const GradCheckOptions&)> run;
};

template <typename L, typename... Args>
Case layer_case(std::string name, double tol, Shape shape, Args... args) {
  return {name, tol, [=](const GradCheckOptions& opt) {
            Rng rng(derive_seed({opt.seed, 0x1a7e}));
            std::unique_ptr<L> layer;
            if constexpr (std::is_constructible_v<L, Args..., Rng&>) {
              layer = std::make_unique<L>(args..., rng);
            } else {
              layer = std::make_unique<L>(args...);
            }
            return nn::grad_check(*layer, name, shape, opt);
          }};
}

GradCheckReport check_loss(const GradCheckOptions& opt) {
  Rng rng(derive_seed({opt.seed, 0x1055}));
  std::vector<int> labels(6);
  for (auto& l : labels) l = static_cast<int>(rng() & 1u);
  nn::GradCheckTarget t;
  t.name = "softmax_cross_entropy";
  Tensor<double> grad;
  t.forward = [&](const Tensor<double>& x) {
    auto r = nn::softmax_cross_entropy(x, labels);
    grad = r.grad;
    return Tensor<double>(Shape{1}, r.loss);
  };
  t.backward = [&](const Tensor<double>& g) {
    Tensor<double> dx = grad;
    for (auto& v : dx.values()) v *= g[0];
    return dx;
  };
  return nn::grad_check(t, Shape{6, 2}, opt);
}

GradCheckReport check_tiny_cnn(const GradCheckOptions& opt) {
  const NetConfig cfg = gradcheck_net_config(opt.seed);
  TinyCnn<double> net(cfg);
  nn::GradCheckTarget t;
  t.name = "tinycnn";
  bool first = true;
  t.forward = [&](const Tensor<double>& x) {
    auto y = net.head().forward(net.trunk().forward(x, nn::Mode::kTrain), nn::Mode::kTrain);
    if (first) {
      net.freeze_randomness(true);
      first = false;
    }
    return y;
  };
  t.backward = [&](const Tensor<double>& g) { return net.trunk().backward(net.head().backward(g)); };
  t.params = net.params();
  t.signature = [&] { return mix64(net.trunk().branch_signature() ^ net.head().branch_signature()); };
  return nn::grad_check(t, Shape{3, 1, cfg.input_size, cfg.input_size}, opt);
}

std::vector<Case> suite_cases() {
  return {
      layer_case<nn::Linear<double>>("linear", kTight, Shape{4, 7}, std::size_t{7}, std::size_t{5}),
      layer_case<nn::Conv2d<double>>("conv2d", kTight, Shape{2, 2, 6, 6}, std::size_t{2}, std::size_t{3}),
      layer_case<nn::MaxPool2x2<double>>("maxpool2x2", kTight, Shape{2, 3, 6, 6}),
      layer_case<nn::Relu<double>>("relu", kTight, Shape{3, 10}),
      layer_case<nn::BatchNorm2d<double>>("batchnorm2d", kLoose, Shape{4, 3, 5, 5}, std::size_t{3}),
      layer_case<nn::Dropout<double>>("dropout", kTight, Shape{4, 10}, 0.5, std::uint64_t{99}),
      layer_case<nn::Flatten<double>>("flatten", kTight, Shape{2, 3, 2, 2}),
      {"softmax_cross_entropy", kTight, check_loss},
      {"tinycnn", kLoose, check_tiny_cnn},
  };
}

}  // namespace

NetConfig gradcheck_net_config(std::uint64_t seed) {
  NetConfig cfg;
  cfg.input_size = 16;
  cfg.channels = {2, 3, 4};
  cfg.hidden = 6;
  cfg.dropout = 0.5;
  cfg.seed = seed;
  return cfg;
}

std::vector<GradCheckSummary> run_gradcheck_suite(std::size_t seeds, std::uint64_t base_seed) {
  std::vector<GradCheckSummary> out;
  for (const Case& c : suite_cases()) {
    GradCheckSummary s;
    s.target = c.name;
    s.tolerance = c.tolerance;
    s.seeds = seeds;
    for (std::size_t k = 0; k < seeds; ++k) {
      GradCheckOptions opt;
      opt.tolerance = c.tolerance;
      opt.seed = derive_seed({base_seed, k});
      const GradCheckReport r = c.run(opt);
      s.max_rel_error = std::max(s.max_rel_error, r.max_rel_error);
      s.probes += r.probes;
      s.skipped += r.skipped;
      if (!r.passed) ++s.failures;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace oaknee::models
