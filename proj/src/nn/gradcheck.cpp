#include "oaknee/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace oaknee::nn {

namespace {

double projected_loss(const Tensor<double>& out, const Tensor<double>& proj) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * proj[i];
  return s;
}

double rel_error(double a, double n, double floor) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

}  // namespace

GradCheckReport grad_check(const GradCheckTarget& target, const Shape& input_shape, const GradCheckOptions& opt) {
  Rng rng(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor<double> x(input_shape);
  for (auto& v : x.values()) v = normal(rng);

  const Tensor<double> out = target.forward(x);
  const std::uint64_t base_signature = target.signature ? target.signature() : 0;
  Tensor<double> proj(out.shape());
  for (auto& v : proj.values()) v = normal(rng);
  const Tensor<double> dx = target.backward(proj);

  // Snapshot analytic parameter gradients before re-running forward.
  std::vector<Tensor<double>> analytic;
  for (const auto& p : target.params) analytic.push_back(*p.grad);

  // Returns nullopt when the probe crosses onto another linear piece.
  auto numeric = [&](double& slot) -> std::optional<double> {
    const double saved = slot;
    slot = saved + opt.epsilon;
    const double up = projected_loss(target.forward(x), proj);
    const bool up_same = !target.signature || target.signature() == base_signature;
    slot = saved - opt.epsilon;
    const double down = projected_loss(target.forward(x), proj);
    const bool down_same = !target.signature || target.signature() == base_signature;
    slot = saved;
    if (!up_same || !down_same) return std::nullopt;
    return (up - down) / (2.0 * opt.epsilon);
  };
  auto probe = [&](GradCheckEntry& e, double analytic_value, double& slot) {
    const auto n = numeric(slot);
    if (!n) {
      ++e.skipped;
      return;
    }
    e.max_rel_error = std::max(e.max_rel_error, rel_error(analytic_value, *n, opt.denominator_floor));
  };

  GradCheckReport report;
  report.target = target.name;
  report.tolerance = opt.tolerance;

  GradCheckEntry input_entry{"input", x.size(), 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) probe(input_entry, dx[i], x[i]);
  report.entries.push_back(input_entry);

  for (std::size_t k = 0; k < target.params.size(); ++k) {
    Tensor<double>& value = *target.params[k].value;
    GradCheckEntry e{target.params[k].name, value.size(), 0.0};
    for (std::size_t i = 0; i < value.size(); ++i) probe(e, analytic[k][i], value[i]);
    report.entries.push_back(e);
  }

  for (const auto& e : report.entries) {
    report.max_rel_error = std::max(report.max_rel_error, e.max_rel_error);
    report.probes += e.elements;
    report.skipped += e.skipped;
  }
  report.passed = report.max_rel_error < opt.tolerance &&
                  static_cast<double>(report.skipped) <= opt.max_skipped_fraction * static_cast<double>(report.probes);
  return report;
}

GradCheckReport grad_check(Layer<double>& layer, const std::string& name, const Shape& input_shape,
                           const GradCheckOptions& opt) {
  GradCheckTarget target;
  target.name = name;
  bool first = true;
  target.forward = [&](const Tensor<double>& x) {
    auto y = layer.forward(x, Mode::kTrain);
    if (first) {
      layer.freeze_randomness(true);
      first = false;
    }
    return y;
  };
  target.backward = [&](const Tensor<double>& g) { return layer.backward(g); };
  target.params = layer.params();
  target.signature = [&] { return layer.branch_signature(); };
  auto report = grad_check(target, input_shape, opt);
  layer.freeze_randomness(false);
  return report;
}

}  // namespace oaknee::nn
