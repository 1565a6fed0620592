#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "oaknee/nn/kernels.hpp"

namespace oaknee::nn {

template <typename T>
struct ParamRef {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;
};

template <typename T>
struct BufferRef {
  std::string name;
  Tensor<T>* value = nullptr;
};

/// Stateful wrapper around a kernel: forward caches what backward needs, and
/// backward overwrites (does not accumulate) the parameter gradients.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<ParamRef<T>> params() { return {}; }
  virtual std::vector<BufferRef<T>> buffers() { return {}; }
  /// When frozen, stochastic layers replay their last random draw. Used by
  /// the finite-difference checker.
  virtual void freeze_randomness(bool) {}
  /// Hash of the linear piece selected by the last forward (max-pool
  /// winners, ReLU signs); 0 for layers that are smooth everywhere.
  virtual std::uint64_t branch_signature() const { return 0; }
  virtual std::string kind() const = 0;
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::size_t in_channels, std::size_t out_channels, Rng& rng);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::string kind() const override { return "conv2d"; }

  Conv2dParams<T>& parameters() { return p_; }

 private:
  Conv2dParams<T> p_;
  Tensor<T> grad_weight_, grad_bias_;
  Tensor<T> input_;
};

template <typename T>
class BatchNorm2d final : public Layer<T> {
 public:
  explicit BatchNorm2d(std::size_t channels);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::vector<BufferRef<T>> buffers() override;
  std::string kind() const override { return "batchnorm2d"; }

  BatchNormParams<T>& parameters() { return p_; }

 private:
  BatchNormParams<T> p_;
  BatchNormCache<T> cache_;
  Tensor<T> grad_gamma_, grad_beta_;
};

template <typename T>
class MaxPool2x2 final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::uint64_t branch_signature() const override;
  std::string kind() const override { return "maxpool2x2"; }

 private:
  Shape input_shape_;
  std::vector<std::size_t> argmax_;
};

template <typename T>
class Relu final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::uint64_t branch_signature() const override;
  std::string kind() const override { return "relu"; }

 private:
  Tensor<T> input_;
};

template <typename T>
class Linear final : public Layer<T> {
 public:
  /// `relu_follows` selects the Kaiming gain (sqrt 2) over the plain fan-in scale.
  Linear(std::size_t in_features, std::size_t out_features, Rng& rng, bool relu_follows = true);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::string kind() const override { return "linear"; }

  Tensor<T>& weight() { return weight_; }
  Tensor<T>& bias() { return bias_; }

 private:
  Tensor<T> weight_, bias_;
  Tensor<T> grad_weight_, grad_bias_;
  Tensor<T> input_;
};

template <typename T>
class Dropout final : public Layer<T> {
 public:
  Dropout(double rate, std::uint64_t seed);
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  void freeze_randomness(bool frozen) override { frozen_ = frozen; }
  std::string kind() const override { return "dropout"; }

  double rate() const { return rate_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  double rate_;
  Rng rng_;
  bool frozen_ = false;
  std::vector<T> mask_;
};

/// (N, ...) -> (N, prod(...)).
template <typename T>
class Flatten final : public Layer<T> {
 public:
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::string kind() const override { return "flatten"; }

 private:
  Shape input_shape_;
};

template <typename T>
class Sequential final : public Layer<T> {
 public:
  Sequential() = default;

  template <typename L, typename... Args>
  L& emplace(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& grad_out) override;
  std::vector<ParamRef<T>> params() override;
  std::vector<BufferRef<T>> buffers() override;
  void freeze_randomness(bool frozen) override;
  std::uint64_t branch_signature() const override;
  std::string kind() const override { return "sequential"; }

  std::size_t size() const { return layers_.size(); }
  Layer<T>& operator[](std::size_t i) { return *layers_[i]; }

  /// Forward that also records every layer's output; for shape inspection.
  std::vector<Shape> trace_shapes(const Tensor<T>& x, Mode mode);

 private:
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

template <typename T>
std::size_t parameter_count(const std::vector<ParamRef<T>>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value->size();
  return n;
}

}  // namespace oaknee::nn
