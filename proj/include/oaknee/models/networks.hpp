#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "oaknee/nn/layers.hpp"

namespace oaknee::models {

using nn::Mode;
using nn::Tensor;

/// Model families.
enum class Arch { kLogistic, kJs2Net, kTinyCnn, kCombined };

std::string arch_tag(Arch a);
Arch parse_arch(const std::string& tag);  // "lr", "js2-nn", "cnn", "combined"

/// Network input: images (N, 1, H, W) and/or feature vectors (N, D).
template <typename T>
struct Batch {
  Tensor<T> images;
  Tensor<T> vectors;
};

template <typename T>
class Network {
 public:
  virtual ~Network() = default;
  virtual Tensor<T> forward(const Batch<T>& batch, Mode mode) = 0;  // logits (N, 2)
  virtual void backward(const Tensor<T>& grad_logits) = 0;
  virtual std::vector<nn::ParamRef<T>> params() = 0;
  virtual std::vector<nn::BufferRef<T>> buffers() = 0;
  virtual void freeze_randomness(bool frozen) = 0;
  virtual Arch arch() const = 0;
};

/// Layer widths of the conv trunk and the FC head. Defaults are the
/// production sizes; reduced configs are used for finite-difference checks.
struct NetConfig {
  std::size_t input_size = 48;
  std::vector<std::size_t> channels = {32, 64, 128};
  std::size_t hidden = 256;
  double dropout = 0.5;
  std::size_t vector_dim = 221;  // Js2Net / Combined feature length
  std::uint64_t seed = 0;
};

/// Three Conv3x3 -> BN -> MaxPool2x2 -> ReLU blocks then flatten.
template <typename T>
nn::Sequential<T> make_trunk(const NetConfig& cfg, Rng& rng);

/// FC(in -> hidden) -> ReLU -> Dropout -> FC(hidden -> 2).
template <typename T>
nn::Sequential<T> make_head(std::size_t in_features, const NetConfig& cfg, Rng& rng);

std::size_t trunk_output_size(const NetConfig& cfg);

template <typename T>
class TinyCnn final : public Network<T> {
 public:
  explicit TinyCnn(const NetConfig& cfg);
  Tensor<T> forward(const Batch<T>& batch, Mode mode) override;
  void backward(const Tensor<T>& grad_logits) override;
  std::vector<nn::ParamRef<T>> params() override;
  std::vector<nn::BufferRef<T>> buffers() override;
  void freeze_randomness(bool frozen) override;
  Arch arch() const override { return Arch::kTinyCnn; }

  nn::Sequential<T>& trunk() { return trunk_; }
  nn::Sequential<T>& head() { return head_; }

 private:
  nn::Sequential<T> trunk_;
  nn::Sequential<T> head_;
};

/// Two-layer network on a feature vector (the JS2 descriptor by default).
template <typename T>
class Js2Net final : public Network<T> {
 public:
  explicit Js2Net(const NetConfig& cfg);
  Tensor<T> forward(const Batch<T>& batch, Mode mode) override;
  void backward(const Tensor<T>& grad_logits) override;
  std::vector<nn::ParamRef<T>> params() override;
  std::vector<nn::BufferRef<T>> buffers() override;
  void freeze_randomness(bool frozen) override;
  Arch arch() const override { return Arch::kJs2Net; }

 private:
  nn::Sequential<T> head_;
};

/// Conv trunk features concatenated with a feature vector, one shared head.
template <typename T>
class CombinedNet final : public Network<T> {
 public:
  explicit CombinedNet(const NetConfig& cfg);
  Tensor<T> forward(const Batch<T>& batch, Mode mode) override;
  void backward(const Tensor<T>& grad_logits) override;
  std::vector<nn::ParamRef<T>> params() override;
  std::vector<nn::BufferRef<T>> buffers() override;
  void freeze_randomness(bool frozen) override;
  Arch arch() const override { return Arch::kCombined; }

  std::size_t fusion_size() const { return fusion_size_; }

 private:
  nn::Sequential<T> trunk_;
  nn::Sequential<T> head_;
  std::size_t trunk_size_ = 0;
  std::size_t fusion_size_ = 0;
};

template <typename T>
std::unique_ptr<Network<T>> make_network(Arch arch, const NetConfig& cfg);

/// Default production configs (dropout 0.5; 0.3 for the combined model).
NetConfig default_config(Arch arch, std::size_t vector_dim, std::uint64_t seed);

}  // namespace oaknee::models
