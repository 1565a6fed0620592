#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "oaknee/nn/layers.hpp"

namespace oaknee::nn {

struct GradCheckEntry {
  std::string tensor;  // "input" or a parameter name
  std::size_t elements = 0;
  double max_rel_error = 0.0;
  std::size_t skipped = 0;  // probes straddling a kink
};

struct GradCheckReport {
  std::string target;
  double tolerance = 0.0;
  double max_rel_error = 0.0;
  bool passed = false;
  std::size_t probes = 0;
  std::size_t skipped = 0;
  std::vector<GradCheckEntry> entries;
};

/// Anything with a differentiable forward: the checked loss is
/// sum(forward(x) * R) for a fixed random projection R.
struct GradCheckTarget {
  std::string name;
  std::function<Tensor<double>(const Tensor<double>&)> forward;
  std::function<Tensor<double>(const Tensor<double>&)> backward;  // returns d/dx, fills param grads
  std::vector<ParamRef<double>> params;
  /// Optional branch_signature() of the last forward. A probe whose +eps or
  /// -eps evaluation lands on a different linear piece straddles a point
  /// where the function is not differentiable; it is skipped and counted.
  std::function<std::uint64_t()> signature;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  double tolerance = 1e-5;
  /// Relative error is |a - n| / max(|a|, |n|, floor).
  double denominator_floor = 1e-3;
  std::uint64_t seed = 0;
  /// The check fails when more than this fraction of probes is skipped.
  double max_skipped_fraction = 0.01;
};

/// Compares analytic gradients against central differences for every input
/// element and every parameter element.
GradCheckReport grad_check(const GradCheckTarget& target, const Shape& input_shape, const GradCheckOptions& opt);

/// Convenience wrapper running a layer in train mode with frozen randomness.
GradCheckReport grad_check(Layer<double>& layer, const std::string& name, const Shape& input_shape,
                           const GradCheckOptions& opt);

}  // namespace oaknee::nn
