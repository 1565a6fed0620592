#include "oaknee/nn/layers.hpp"

#include <cmath>

namespace oaknee::nn {

namespace {

template <typename T>
Tensor<T> normal_init(Shape shape, double stddev, Rng& rng) {
  Tensor<T> t(std::move(shape));
  std::normal_distribution<double> dist(0.0, stddev);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
std::vector<ParamRef<T>> prefixed(std::vector<ParamRef<T>> refs, const std::string& prefix) {
  for (auto& r : refs) r.name = prefix + r.name;
  return refs;
}

}  // namespace

template <typename T>
Conv2d<T>::Conv2d(std::size_t in_channels, std::size_t out_channels, Rng& rng) {
  const double fan_in = static_cast<double>(in_channels * 9);
  p_.weight = normal_init<T>({out_channels, in_channels, 3, 3}, std::sqrt(2.0 / fan_in), rng);
  p_.bias = Tensor<T>({out_channels});
  grad_weight_ = Tensor<T>(p_.weight.shape());
  grad_bias_ = Tensor<T>(p_.bias.shape());
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return conv2d_forward(x, p_);
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out) {
  auto g = conv2d_backward(input_, p_, grad_out);
  grad_weight_ = std::move(g.weight);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> Conv2d<T>::params() {
  return {{"weight", &p_.weight, &grad_weight_}, {"bias", &p_.bias, &grad_bias_}};
}

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::size_t channels)
    : p_(BatchNormParams<T>::identity(channels)), grad_gamma_({channels}), grad_beta_({channels}) {}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, Mode mode) {
  return batchnorm2d_forward(x, p_, mode, mode == Mode::kTrain ? &cache_ : nullptr);
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& grad_out) {
  auto g = batchnorm2d_backward(grad_out, p_, cache_);
  grad_gamma_ = std::move(g.gamma);
  grad_beta_ = std::move(g.beta);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> BatchNorm2d<T>::params() {
  return {{"gamma", &p_.gamma, &grad_gamma_}, {"beta", &p_.beta, &grad_beta_}};
}

template <typename T>
std::vector<BufferRef<T>> BatchNorm2d<T>::buffers() {
  return {{"running_mean", &p_.running_mean}, {"running_var", &p_.running_var}};
}

template <typename T>
Tensor<T> MaxPool2x2<T>::forward(const Tensor<T>& x, Mode) {
  input_shape_ = x.shape();
  return maxpool2x2_forward(x, &argmax_);
}

template <typename T>
Tensor<T> MaxPool2x2<T>::backward(const Tensor<T>& grad_out) {
  return maxpool2x2_backward(input_shape_, argmax_, grad_out);
}

template <typename T>
std::uint64_t MaxPool2x2<T>::branch_signature() const {
  std::uint64_t h = 0x3779b97f4a7c15ULL;
  for (std::size_t a : argmax_) h = mix64(h ^ a);
  return h;
}

template <typename T>
Tensor<T> Relu<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return relu_forward(x);
}

template <typename T>
Tensor<T> Relu<T>::backward(const Tensor<T>& grad_out) {
  return relu_backward(input_, grad_out);
}

template <typename T>
std::uint64_t Relu<T>::branch_signature() const {
  std::uint64_t h = 0x7f4a7c159e3779b9ULL, word = 0;
  for (std::size_t i = 0; i < input_.size(); ++i) {
    word = (word << 1) | (input_[i] > T(0) ? 1u : 0u);
    if (i % 64 == 63) h = mix64(h ^ word), word = 0;
  }
  return mix64(h ^ word ^ input_.size());
}

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features, Rng& rng, bool relu_follows) {
  const double gain = relu_follows ? 2.0 : 1.0;
  weight_ = normal_init<T>({in_features, out_features}, std::sqrt(gain / static_cast<double>(in_features)), rng);
  bias_ = Tensor<T>({out_features});
  grad_weight_ = Tensor<T>(weight_.shape());
  grad_bias_ = Tensor<T>(bias_.shape());
}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, Mode) {
  input_ = x;
  return linear_forward(x, weight_, bias_);
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out) {
  auto g = linear_backward(input_, weight_, grad_out);
  grad_weight_ = std::move(g.weight);
  grad_bias_ = std::move(g.bias);
  return std::move(g.input);
}

template <typename T>
std::vector<ParamRef<T>> Linear<T>::params() {
  return {{"weight", &weight_, &grad_weight_}, {"bias", &bias_, &grad_bias_}};
}

template <typename T>
Dropout<T>::Dropout(double rate, std::uint64_t seed) : rate_(rate), rng_(seed) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, Mode mode) {
  if (frozen_ && mode == Mode::kTrain && mask_.size() == x.size()) {
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask_[i];
    return y;
  }
  return dropout_forward(x, rate_, mode, rng_, &mask_);
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> dx(grad_out.shape());
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = grad_out[i] * mask_[i];
  return dx;
}

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x, Mode) {
  input_shape_ = x.shape();
  return x.reshaped({x.dim(0), x.size() / x.dim(0)});
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& grad_out) {
  return grad_out.reshaped(input_shape_);
}

template <typename T>
Tensor<T> Sequential<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> h = x;
  for (auto& layer : layers_) h = layer->forward(h, mode);
  return h;
}

template <typename T>
Tensor<T> Sequential<T>::backward(const Tensor<T>& grad_out) {
  Tensor<T> g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

template <typename T>
std::vector<ParamRef<T>> Sequential<T>::params() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto p = prefixed(layers_[i]->params(), std::to_string(i) + ".");
    out.insert(out.end(), p.begin(), p.end());
  }
  return out;
}

template <typename T>
std::vector<BufferRef<T>> Sequential<T>::buffers() {
  std::vector<BufferRef<T>> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    for (auto b : layers_[i]->buffers()) {
      b.name = std::to_string(i) + "." + b.name;
      out.push_back(b);
    }
  }
  return out;
}

template <typename T>
void Sequential<T>::freeze_randomness(bool frozen) {
  for (auto& layer : layers_) layer->freeze_randomness(frozen);
}

template <typename T>
std::uint64_t Sequential<T>::branch_signature() const {
  std::uint64_t h = 0;
  for (const auto& layer : layers_) h = mix64(h ^ layer->branch_signature());
  return h;
}

template <typename T>
std::vector<Shape> Sequential<T>::trace_shapes(const Tensor<T>& x, Mode mode) {
  std::vector<Shape> shapes;
  Tensor<T> h = x;
  for (auto& layer : layers_) {
    h = layer->forward(h, mode);
    shapes.push_back(h.shape());
  }
  return shapes;
}

#define OAKNEE_INSTANTIATE(T) \
  template class Conv2d<T>;   \
  template class BatchNorm2d<T>; \
  template class MaxPool2x2<T>;  \
  template class Relu<T>;        \
  template class Linear<T>;      \
  template class Dropout<T>;     \
  template class Flatten<T>;     \
  template class Sequential<T>;

OAKNEE_INSTANTIATE(float)
OAKNEE_INSTANTIATE(double)

#undef OAKNEE_INSTANTIATE

}  // namespace oaknee::nn
