#pragma once

#include <cstddef>
#include <vector>

#include "oaknee/nn/layers.hpp"

namespace oaknee::nn {

/// Classic (heavy-ball) momentum: v <- mu v + g (+ wd p); p <- p - lr v.
template <typename T>
struct SgdState {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::vector<Tensor<T>> velocity;  // one per parameter, created on first step
};

template <typename T>
void sgd_momentum_step(const std::vector<ParamRef<T>>& params, SgdState<T>& state) {
  if (state.velocity.empty()) {
    for (const auto& p : params) state.velocity.emplace_back(p.value->shape());
  }
  if (state.velocity.size() != params.size()) throw ShapeError("SGD state does not match parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<T>& value = *params[i].value;
    const Tensor<T>& grad = *params[i].grad;
    Tensor<T>& v = state.velocity[i];
    if (value.shape() != grad.shape() || value.shape() != v.shape()) {
      throw ShapeError("SGD shape mismatch for parameter '" + params[i].name + "'");
    }
    const T mu = static_cast<T>(state.momentum);
    const T lr = static_cast<T>(state.lr);
    const T wd = static_cast<T>(state.weight_decay);
    for (std::size_t k = 0; k < value.size(); ++k) {
      v[k] = mu * v[k] + grad[k] + wd * value[k];
      value[k] -= lr * v[k];
    }
  }
}

/// Step decay: lr0 * factor^(epoch / step_epochs).
double step_learning_rate(double lr0, std::size_t epoch, std::size_t step_epochs, double factor);

}  // namespace oaknee::nn
