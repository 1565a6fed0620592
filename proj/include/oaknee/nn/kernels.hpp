#pragma once

// Forward/backward kernels for the fixed layer set. Each backward returns
// exact analytic gradients; float and double are instantiated.

#include <cstdint>
#include <vector>

#include "oaknee/nn/tensor.hpp"
#include "oaknee/rng.hpp"

namespace oaknee::nn {

enum class Mode { kTrain, kEval };

// 3x3 convolution, stride 1, zero padding 1, NCHW.
template <typename T>
struct Conv2dParams {
  Tensor<T> weight;  // (out, in, 3, 3)
  Tensor<T> bias;    // (out)
};

template <typename T>
struct Conv2dGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Conv2dParams<T>& p);
template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Conv2dParams<T>& p, const Tensor<T>& grad_out);

template <typename T>
struct BatchNormParams {
  Tensor<T> gamma;
  Tensor<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
  T momentum = T(0.1);
  T eps = T(1e-5);

  static BatchNormParams identity(std::size_t channels);
};

template <typename T>
struct BatchNormCache {
  Tensor<T> xhat;
  std::vector<T> inv_std;
};

template <typename T>
struct BatchNormGrads {
  Tensor<T> input;
  Tensor<T> gamma;
  Tensor<T> beta;
};

/// Train mode normalizes with biased batch statistics and folds them into
/// the running estimates (running variance uses the unbiased estimate).
/// Throws BatchTooSmall for a single-sample batch in train mode.
template <typename T>
Tensor<T> batchnorm2d_forward(const Tensor<T>& x, BatchNormParams<T>& p, Mode mode,
                              BatchNormCache<T>* cache = nullptr);
/// Backward for a train-mode forward (batch statistics path).
template <typename T>
BatchNormGrads<T> batchnorm2d_backward(const Tensor<T>& grad_out, const BatchNormParams<T>& p,
                                       const BatchNormCache<T>& cache);

/// Non-overlapping 2x2 max pool. `argmax` receives the flat input index of
/// each output; ties go to the first element in row-major order.
template <typename T>
Tensor<T> maxpool2x2_forward(const Tensor<T>& x, std::vector<std::size_t>* argmax = nullptr);
template <typename T>
Tensor<T> maxpool2x2_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                              const Tensor<T>& grad_out);

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x);
template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out);

template <typename T>
struct LinearGrads {
  Tensor<T> input;
  Tensor<T> weight;
  Tensor<T> bias;
};

/// y = x W + b with x (N, in), W (in, out), b (out).
template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);
template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& grad_out);

/// Inverted dropout. In train mode `mask` receives the per-element scale
/// (0 or 1/(1-rate)); eval mode is the identity.
template <typename T>
Tensor<T> dropout_forward(const Tensor<T>& x, double rate, Mode mode, Rng& rng, std::vector<T>* mask = nullptr);

template <typename T>
struct LossResult {
  double loss = 0.0;
  Tensor<T> grad;  // d loss / d logits
};

/// Mean softmax cross-entropy over a (N, 2) batch of logits.
template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels);

/// Row-wise softmax probability of class 1 for (N, 2) logits.
template <typename T>
std::vector<double> positive_probability(const Tensor<T>& logits);

}  // namespace oaknee::nn
