#include "oaknee/models/networks.hpp"

namespace oaknee::models {

namespace {

template <typename T>
std::vector<nn::ParamRef<T>> with_prefix(std::vector<nn::ParamRef<T>> refs, const std::string& prefix) {
  for (auto& r : refs) r.name = prefix + r.name;
  return refs;
}

template <typename T>
std::vector<nn::BufferRef<T>> with_prefix(std::vector<nn::BufferRef<T>> refs, const std::string& prefix) {
  for (auto& r : refs) r.name = prefix + r.name;
  return refs;
}

template <typename V>
V concat(V a, const V& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::string arch_tag(Arch a) {
  switch (a) {
    case Arch::kLogistic:
      return "lr";
    case Arch::kJs2Net:
      return "js2-nn";
    case Arch::kTinyCnn:
      return "cnn";
    case Arch::kCombined:
      return "combined";
  }
  return "unknown";
}

Arch parse_arch(const std::string& tag) {
  if (tag == "lr") return Arch::kLogistic;
  if (tag == "js2-nn") return Arch::kJs2Net;
  if (tag == "cnn") return Arch::kTinyCnn;
  if (tag == "combined") return Arch::kCombined;
  throw InvalidArgument("unknown model tag '" + tag + "' (expected lr, js2-nn, cnn, combined)");
}

std::size_t trunk_output_size(const NetConfig& cfg) {
  std::size_t side = cfg.input_size;
  for (std::size_t i = 0; i < cfg.channels.size(); ++i) side /= 2;
  return cfg.channels.back() * side * side;
}

template <typename T>
nn::Sequential<T> make_trunk(const NetConfig& cfg, Rng& rng) {
  nn::Sequential<T> trunk;
  std::size_t in = 1;
  for (std::size_t out : cfg.channels) {
    trunk.template emplace<nn::Conv2d<T>>(in, out, rng);
    trunk.template emplace<nn::BatchNorm2d<T>>(out);
    trunk.template emplace<nn::MaxPool2x2<T>>();
    trunk.template emplace<nn::Relu<T>>();
    in = out;
  }
  trunk.template emplace<nn::Flatten<T>>();
  return trunk;
}

template <typename T>
nn::Sequential<T> make_head(std::size_t in_features, const NetConfig& cfg, Rng& rng) {
  nn::Sequential<T> head;
  head.template emplace<nn::Linear<T>>(in_features, cfg.hidden, rng, true);
  head.template emplace<nn::Relu<T>>();
  head.template emplace<nn::Dropout<T>>(cfg.dropout, derive_seed({cfg.seed, 0xd80u}));
  head.template emplace<nn::Linear<T>>(cfg.hidden, 2, rng, false);
  return head;
}

template <typename T>
TinyCnn<T>::TinyCnn(const NetConfig& cfg) {
  Rng rng(derive_seed({cfg.seed, 1}));
  trunk_ = make_trunk<T>(cfg, rng);
  head_ = make_head<T>(trunk_output_size(cfg), cfg, rng);
}

template <typename T>
Tensor<T> TinyCnn<T>::forward(const Batch<T>& batch, Mode mode) {
  if (batch.images.rank() != 4 || batch.images.dim(1) != 1) {
    throw ShapeError("TinyCnn expects (N, 1, H, W) images, got " + nn::shape_string(batch.images.shape()));
  }
  return head_.forward(trunk_.forward(batch.images, mode), mode);
}

template <typename T>
void TinyCnn<T>::backward(const Tensor<T>& grad_logits) {
  trunk_.backward(head_.backward(grad_logits));
}

template <typename T>
std::vector<nn::ParamRef<T>> TinyCnn<T>::params() {
  return concat(with_prefix(trunk_.params(), "trunk."), with_prefix(head_.params(), "head."));
}

template <typename T>
std::vector<nn::BufferRef<T>> TinyCnn<T>::buffers() {
  return with_prefix(trunk_.buffers(), "trunk.");
}

template <typename T>
void TinyCnn<T>::freeze_randomness(bool frozen) {
  head_.freeze_randomness(frozen);
}

template <typename T>
Js2Net<T>::Js2Net(const NetConfig& cfg) {
  Rng rng(derive_seed({cfg.seed, 2}));
  head_ = make_head<T>(cfg.vector_dim, cfg, rng);
}

template <typename T>
Tensor<T> Js2Net<T>::forward(const Batch<T>& batch, Mode mode) {
  if (batch.vectors.rank() != 2) {
    throw ShapeError("Js2Net expects (N, D) vectors, got " + nn::shape_string(batch.vectors.shape()));
  }
  return head_.forward(batch.vectors, mode);
}

template <typename T>
void Js2Net<T>::backward(const Tensor<T>& grad_logits) {
  head_.backward(grad_logits);
}

template <typename T>
std::vector<nn::ParamRef<T>> Js2Net<T>::params() {
  return with_prefix(head_.params(), "head.");
}

template <typename T>
std::vector<nn::BufferRef<T>> Js2Net<T>::buffers() {
  return {};
}

template <typename T>
void Js2Net<T>::freeze_randomness(bool frozen) {
  head_.freeze_randomness(frozen);
}

template <typename T>
CombinedNet<T>::CombinedNet(const NetConfig& cfg) {
  Rng rng(derive_seed({cfg.seed, 3}));
  trunk_ = make_trunk<T>(cfg, rng);
  trunk_size_ = trunk_output_size(cfg);
  fusion_size_ = trunk_size_ + cfg.vector_dim;
  head_ = make_head<T>(fusion_size_, cfg, rng);
}

template <typename T>
Tensor<T> CombinedNet<T>::forward(const Batch<T>& batch, Mode mode) {
  if (batch.images.rank() != 4 || batch.vectors.rank() != 2 || batch.images.dim(0) != batch.vectors.dim(0)) {
    throw ShapeError("CombinedNet expects (N, 1, H, W) images and (N, D) vectors, got " +
                     nn::shape_string(batch.images.shape()) + " and " + nn::shape_string(batch.vectors.shape()));
  }
  const Tensor<T> texture = trunk_.forward(batch.images, mode);
  const std::size_t n = texture.dim(0), d = batch.vectors.dim(1);
  if (texture.dim(1) + d != fusion_size_) {
    throw ShapeError("fusion length " + std::to_string(texture.dim(1) + d) + " != " + std::to_string(fusion_size_));
  }
  Tensor<T> fused({n, fusion_size_});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(texture.data() + i * trunk_size_, trunk_size_, fused.data() + i * fusion_size_);
    std::copy_n(batch.vectors.data() + i * d, d, fused.data() + i * fusion_size_ + trunk_size_);
  }
  return head_.forward(fused, mode);
}

template <typename T>
void CombinedNet<T>::backward(const Tensor<T>& grad_logits) {
  const Tensor<T> g = head_.backward(grad_logits);
  const std::size_t n = g.dim(0);
  Tensor<T> g_texture({n, trunk_size_});
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(g.data() + i * fusion_size_, trunk_size_, g_texture.data() + i * trunk_size_);
  }
  trunk_.backward(g_texture);
}

template <typename T>
std::vector<nn::ParamRef<T>> CombinedNet<T>::params() {
  return concat(with_prefix(trunk_.params(), "trunk."), with_prefix(head_.params(), "head."));
}

template <typename T>
std::vector<nn::BufferRef<T>> CombinedNet<T>::buffers() {
  return with_prefix(trunk_.buffers(), "trunk.");
}

template <typename T>
void CombinedNet<T>::freeze_randomness(bool frozen) {
  head_.freeze_randomness(frozen);
}

template <typename T>
std::unique_ptr<Network<T>> make_network(Arch arch, const NetConfig& cfg) {
  switch (arch) {
    case Arch::kTinyCnn:
      return std::make_unique<TinyCnn<T>>(cfg);
    case Arch::kJs2Net:
      return std::make_unique<Js2Net<T>>(cfg);
    case Arch::kCombined:
      return std::make_unique<CombinedNet<T>>(cfg);
    case Arch::kLogistic:
      break;
  }
  throw InvalidArgument("logistic regression is not a network");
}

NetConfig default_config(Arch arch, std::size_t vector_dim, std::uint64_t seed) {
  NetConfig cfg;
  cfg.vector_dim = vector_dim;
  cfg.seed = seed;
  cfg.dropout = arch == Arch::kCombined ? 0.3 : 0.5;
  return cfg;
}

#define OAKNEE_INSTANTIATE(T)                                                    \
  template nn::Sequential<T> make_trunk<T>(const NetConfig&, Rng&);              \
  template nn::Sequential<T> make_head<T>(std::size_t, const NetConfig&, Rng&);  \
  template class TinyCnn<T>;                                                     \
  template class Js2Net<T>;                                                      \
  template class CombinedNet<T>;                                                 \
  template std::unique_ptr<Network<T>> make_network<T>(Arch, const NetConfig&);

OAKNEE_INSTANTIATE(float)
OAKNEE_INSTANTIATE(double)

#undef OAKNEE_INSTANTIATE

}  // namespace oaknee::models
