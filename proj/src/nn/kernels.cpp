#include "oaknee/nn/kernels.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "oaknee/parallel.hpp"

namespace oaknee::nn {

namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

// Samples per GEMM and reduction chunk. Fixed so that the summation order of
// gradients does not depend on the number of worker threads.
constexpr std::size_t kChunk = 4;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

// Columns [lo, hi) of an output row read from a valid source column for a
// horizontal tap offset kx - 1.
inline void valid_range(std::size_t w, std::size_t kx, std::size_t& lo, std::size_t& hi) {
  lo = kx == 0 ? 1 : 0;
  hi = kx == 2 ? w - 1 : w;
  if (w == 1 && kx != 1) lo = hi = 0;
}

template <typename T>
void im2col(const T* x, std::size_t channels, std::size_t h, std::size_t w, T* col, std::size_t ld) {
  const std::size_t hw = h * w;
  for (std::size_t c = 0; c < channels; ++c) {
    const T* plane = x + c * hw;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        T* row = col + ((c * 9) + ky * 3 + kx) * ld;
        std::size_t lo = 0, hi = 0;
        valid_range(w, kx, lo, hi);
        for (std::size_t y = 0; y < h; ++y) {
          T* out = row + y * w;
          const std::size_t sy = y + ky;  // source row + 1
          if (sy == 0 || sy > h) {
            std::fill(out, out + w, T(0));
            continue;
          }
          const T* src = plane + (sy - 1) * w + kx;  // src[xx - 1] is column xx + kx - 1
          std::fill(out, out + lo, T(0));
          for (std::size_t xx = lo; xx < hi; ++xx) out[xx] = src[xx - 1];
          std::fill(out + hi, out + w, T(0));
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, std::size_t channels, std::size_t h, std::size_t w, T* dx, std::size_t ld) {
  const std::size_t hw = h * w;
  std::fill(dx, dx + channels * hw, T(0));
  for (std::size_t c = 0; c < channels; ++c) {
    T* plane = dx + c * hw;
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const T* row = col + ((c * 9) + ky * 3 + kx) * ld;
        std::size_t lo = 0, hi = 0;
        valid_range(w, kx, lo, hi);
        for (std::size_t y = 0; y < h; ++y) {
          const std::size_t sy = y + ky;
          if (sy == 0 || sy > h) continue;
          T* dst = plane + (sy - 1) * w + kx;
          const T* src = row + y * w;
          for (std::size_t xx = lo; xx < hi; ++xx) dst[xx - 1] += src[xx];
        }
      }
    }
  }
}

// Plane reductions with eight independent double accumulators combined in a
// fixed tree; vectorizes and keeps a fixed summation order.
template <typename T>
double plane_sum(const T* p, std::size_t n) {
  double a[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (int k = 0; k < 8; ++k) a[k] += static_cast<double>(p[j + k]);
  }
  for (; j < n; ++j) a[0] += static_cast<double>(p[j]);
  return ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
}

template <typename T>
double plane_sq_dev(const T* p, std::size_t n, double mean) {
  double a[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (int k = 0; k < 8; ++k) {
      const double d = static_cast<double>(p[j + k]) - mean;
      a[k] += d * d;
    }
  }
  for (; j < n; ++j) {
    const double d = static_cast<double>(p[j]) - mean;
    a[0] += d * d;
  }
  return ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
}

template <typename T>
double plane_dot(const T* p, const T* q, std::size_t n) {
  double a[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    for (int k = 0; k < 8; ++k) a[k] += static_cast<double>(p[j + k]) * static_cast<double>(q[j + k]);
  }
  for (; j < n; ++j) a[0] += static_cast<double>(p[j]) * static_cast<double>(q[j]);
  return ((a[0] + a[1]) + (a[2] + a[3])) + ((a[4] + a[5]) + (a[6] + a[7]));
}

template <typename T>
void check_conv(const Tensor<T>& x, const Conv2dParams<T>& p) {
  require(x.rank() == 4, "conv2d expects NCHW input, got " + shape_string(x.shape()));
  require(p.weight.rank() == 4 && p.weight.dim(2) == 3 && p.weight.dim(3) == 3,
          "conv2d weight must be (out, in, 3, 3), got " + shape_string(p.weight.shape()));
  require(p.weight.dim(1) == x.dim(1), "conv2d input has " + std::to_string(x.dim(1)) +
                                           " channels, weight expects " + std::to_string(p.weight.dim(1)));
  require(p.bias.size() == p.weight.dim(0), "conv2d bias length mismatch");
  require(x.dim(2) >= 1 && x.dim(3) >= 1, "conv2d needs non-empty spatial dims");
}

}  // namespace

// Samples are processed in chunks of kChunk: their im2col matrices sit side
// by side so each chunk is one wide GEMM.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Conv2dParams<T>& p) {
  check_conv(x, p);
  const std::size_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t cout = p.weight.dim(0), k = cin * 9, hw = h * w;
  Tensor<T> y({n, cout, h, w});
  ConstMapMat<T> wm(p.weight.data(), cout, k);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t ch) {
    const std::size_t first = ch * kChunk, count = std::min(n, first + kChunk) - first;
    const std::size_t ld = count * hw;
    std::vector<T> col(k * ld);
    for (std::size_t s = 0; s < count; ++s) {
      im2col(x.data() + (first + s) * cin * hw, cin, h, w, col.data() + s * hw, ld);
    }
    RowMat<T> out(cout, ld);
    out.noalias() = wm * ConstMapMat<T>(col.data(), k, ld);
    for (std::size_t s = 0; s < count; ++s) {
      for (std::size_t o = 0; o < cout; ++o) {
        const T b = p.bias[o];
        const T* src = out.data() + o * ld + s * hw;
        T* dst = y.data() + ((first + s) * cout + o) * hw;
        for (std::size_t j = 0; j < hw; ++j) dst[j] = src[j] + b;
      }
    }
  });
  return y;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const Tensor<T>& x, const Conv2dParams<T>& p, const Tensor<T>& grad_out) {
  check_conv(x, p);
  const std::size_t n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t cout = p.weight.dim(0), k = cin * 9, hw = h * w;
  require(grad_out.shape() == Shape({n, cout, h, w}), "conv2d grad_out shape mismatch");

  Conv2dGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(p.weight.shape()), Tensor<T>(p.bias.shape())};
  ConstMapMat<T> wm(p.weight.data(), cout, k);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<RowMat<T>> dw_part(chunks);
  std::vector<Eigen::Matrix<T, Eigen::Dynamic, 1>> db_part(chunks);

  parallel_for(chunks, [&](std::size_t ch) {
    const std::size_t first = ch * kChunk, count = std::min(n, first + kChunk) - first;
    const std::size_t ld = count * hw;
    std::vector<T> col(k * ld);
    RowMat<T> gy(cout, ld);
    for (std::size_t s = 0; s < count; ++s) {
      im2col(x.data() + (first + s) * cin * hw, cin, h, w, col.data() + s * hw, ld);
      for (std::size_t o = 0; o < cout; ++o) {
        const T* src = grad_out.data() + ((first + s) * cout + o) * hw;
        std::copy(src, src + hw, gy.data() + o * ld + s * hw);
      }
    }
    dw_part[ch].noalias() = gy * ConstMapMat<T>(col.data(), k, ld).transpose();
    db_part[ch] = gy.rowwise().sum();
    RowMat<T> dcol(k, ld);
    dcol.noalias() = wm.transpose() * gy;
    for (std::size_t s = 0; s < count; ++s) {
      col2im(dcol.data() + s * hw, cin, h, w, g.input.data() + (first + s) * cin * hw, ld);
    }
  });

  MapMat<T> dw(g.weight.data(), cout, k);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> db(g.bias.data(), cout);
  dw.setZero();
  db.setZero();
  for (std::size_t ch = 0; ch < chunks; ++ch) {
    dw += dw_part[ch];
    db += db_part[ch];
  }
  return g;
}

template <typename T>
BatchNormParams<T> BatchNormParams<T>::identity(std::size_t channels) {
  BatchNormParams<T> p;
  p.gamma = Tensor<T>({channels}, T(1));
  p.beta = Tensor<T>({channels}, T(0));
  p.running_mean = Tensor<T>({channels}, T(0));
  p.running_var = Tensor<T>({channels}, T(1));
  return p;
}

template <typename T>
Tensor<T> batchnorm2d_forward(const Tensor<T>& x, BatchNormParams<T>& p, Mode mode, BatchNormCache<T>* cache) {
  require(x.rank() == 4, "batchnorm2d expects NCHW input, got " + shape_string(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  require(p.gamma.size() == c && p.beta.size() == c && p.running_mean.size() == c && p.running_var.size() == c,
          "batchnorm2d parameters do not match " + std::to_string(c) + " channels");
  Tensor<T> y(x.shape());

  if (mode == Mode::kEval) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T inv = T(1) / std::sqrt(p.running_var[ch] + p.eps);
      const T scale = p.gamma[ch] * inv;
      const T shift = p.beta[ch] - p.running_mean[ch] * scale;
      for (std::size_t i = 0; i < n; ++i) {
        const T* src = x.data() + (i * c + ch) * hw;
        T* dst = y.data() + (i * c + ch) * hw;
        for (std::size_t j = 0; j < hw; ++j) dst[j] = src[j] * scale + shift;
      }
    }
    return y;
  }

  if (n < 2) throw BatchTooSmall("batchnorm2d in train mode needs at least 2 samples");
  const std::size_t m = n * hw;
  Tensor<T> xhat(x.shape());
  std::vector<T> inv_std(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += plane_sum(x.data() + (i * c + ch) * hw, hw);
    const double mean = sum / static_cast<double>(m);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) sq += plane_sq_dev(x.data() + (i * c + ch) * hw, hw, mean);
    const double var = sq / static_cast<double>(m);
    const T inv = static_cast<T>(1.0 / std::sqrt(var + static_cast<double>(p.eps)));
    inv_std[ch] = inv;
    const T mean_t = static_cast<T>(mean);
    const T gamma = p.gamma[ch], beta = p.beta[ch];
    for (std::size_t i = 0; i < n; ++i) {
      const T* src = x.data() + (i * c + ch) * hw;
      T* xh = xhat.data() + (i * c + ch) * hw;
      T* dst = y.data() + (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        xh[j] = (src[j] - mean_t) * inv;
        dst[j] = gamma * xh[j] + beta;
      }
    }
    const double unbiased = sq / static_cast<double>(m - 1);
    p.running_mean[ch] = static_cast<T>((1.0 - p.momentum) * p.running_mean[ch] + p.momentum * mean);
    p.running_var[ch] = static_cast<T>((1.0 - p.momentum) * p.running_var[ch] + p.momentum * unbiased);
  }
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

template <typename T>
BatchNormGrads<T> batchnorm2d_backward(const Tensor<T>& grad_out, const BatchNormParams<T>& p,
                                       const BatchNormCache<T>& cache) {
  require(grad_out.shape() == cache.xhat.shape(), "batchnorm2d grad_out shape mismatch");
  const std::size_t n = grad_out.dim(0), c = grad_out.dim(1), hw = grad_out.dim(2) * grad_out.dim(3);
  const double m = static_cast<double>(n * hw);
  BatchNormGrads<T> g{Tensor<T>(grad_out.shape()), Tensor<T>({c}), Tensor<T>({c})};
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum_g = 0.0, sum_gx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * c + ch) * hw;
      sum_g += plane_sum(grad_out.data() + off, hw);
      sum_gx += plane_dot(grad_out.data() + off, cache.xhat.data() + off, hw);
    }
    g.beta[ch] = static_cast<T>(sum_g);
    g.gamma[ch] = static_cast<T>(sum_gx);
    const double k = static_cast<double>(p.gamma[ch]) * cache.inv_std[ch] / m;
    const T a = static_cast<T>(k * m), b = static_cast<T>(k * sum_g), d = static_cast<T>(k * sum_gx);
    for (std::size_t i = 0; i < n; ++i) {
      const T* gy = grad_out.data() + (i * c + ch) * hw;
      const T* xh = cache.xhat.data() + (i * c + ch) * hw;
      T* dx = g.input.data() + (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) dx[j] = a * gy[j] - b - xh[j] * d;
    }
  }
  return g;
}

template <typename T>
Tensor<T> maxpool2x2_forward(const Tensor<T>& x, std::vector<std::size_t>* argmax) {
  require(x.rank() == 4, "maxpool2x2 expects NCHW input, got " + shape_string(x.shape()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  require(h % 2 == 0 && w % 2 == 0, "maxpool2x2 needs even spatial dims, got " + shape_string(x.shape()));
  const std::size_t oh = h / 2, ow = w / 2;
  Tensor<T> y({n, c, oh, ow});
  if (argmax) argmax->assign(y.size(), 0);
  std::size_t o = 0;
  for (std::size_t plane = 0; plane < n * c; ++plane) {
    const std::size_t base = plane * h * w;
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j, ++o) {
        const std::size_t cand[4] = {base + 2 * i * w + 2 * j, base + 2 * i * w + 2 * j + 1,
                                     base + (2 * i + 1) * w + 2 * j, base + (2 * i + 1) * w + 2 * j + 1};
        std::size_t best = cand[0];
        for (int q = 1; q < 4; ++q) {
          if (x[cand[q]] > x[best]) best = cand[q];
        }
        y[o] = x[best];
        if (argmax) (*argmax)[o] = best;
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> maxpool2x2_backward(const Shape& input_shape, const std::vector<std::size_t>& argmax,
                              const Tensor<T>& grad_out) {
  require(argmax.size() == grad_out.size(), "maxpool2x2 backward: argmax/grad size mismatch");
  Tensor<T> dx(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += grad_out[o];
  return dx;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& grad_out) {
  require(x.shape() == grad_out.shape(), "relu backward shape mismatch");
  Tensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T(0) ? grad_out[i] : T(0);
  return dx;
}

template <typename T>
Tensor<T> linear_forward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
  require(x.rank() == 2 && weight.rank() == 2, "linear expects (N, in) input and (in, out) weight");
  require(x.dim(1) == weight.dim(0), "linear inner dims disagree: " + shape_string(x.shape()) + " x " +
                                         shape_string(weight.shape()));
  require(bias.size() == weight.dim(1), "linear bias length mismatch");
  const std::size_t n = x.dim(0), in = x.dim(1), out = weight.dim(1);
  Tensor<T> y({n, out});
  MapMat<T> ym(y.data(), n, out);
  ym.noalias() = ConstMapMat<T>(x.data(), n, in) * ConstMapMat<T>(weight.data(), in, out);
  ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(bias.data(), out);
  return y;
}

template <typename T>
LinearGrads<T> linear_backward(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& grad_out) {
  const std::size_t n = x.dim(0), in = x.dim(1), out = weight.dim(1);
  require(grad_out.shape() == Shape({n, out}), "linear grad_out shape mismatch");
  LinearGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(weight.shape()), Tensor<T>({out})};
  ConstMapMat<T> xm(x.data(), n, in);
  ConstMapMat<T> gy(grad_out.data(), n, out);
  MapMat<T>(g.weight.data(), in, out).noalias() = xm.transpose() * gy;
  MapMat<T>(g.input.data(), n, in).noalias() = gy * ConstMapMat<T>(weight.data(), in, out).transpose();
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(g.bias.data(), out) = gy.colwise().sum();
  return g;
}

template <typename T>
Tensor<T> dropout_forward(const Tensor<T>& x, double rate, Mode mode, Rng& rng, std::vector<T>* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout rate must lie in [0, 1)");
  if (mode == Mode::kEval || rate == 0.0) {
    if (mask) mask->assign(x.size(), T(1));
    return x;
  }
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  Tensor<T> y(x.shape());
  if (mask) mask->resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T s = keep(rng) ? scale : T(0);
    if (mask) (*mask)[i] = s;
    y[i] = x[i] * s;
  }
  return y;
}

template <typename T>
LossResult<T> softmax_cross_entropy(const Tensor<T>& logits, const std::vector<int>& labels) {
  require(logits.rank() == 2 && logits.dim(1) == 2, "cross entropy expects (N, 2) logits, got " +
                                                        shape_string(logits.shape()));
  const std::size_t n = logits.dim(0);
  require(labels.size() == n, "cross entropy label count mismatch");
  LossResult<T> r{0.0, Tensor<T>(logits.shape())};
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw InvalidArgument("labels must be 0 or 1");
    const double a = logits[2 * i], b = logits[2 * i + 1];
    const double mx = std::max(a, b);
    const double lse = mx + std::log(std::exp(a - mx) + std::exp(b - mx));
    const double target = labels[i] == 1 ? b : a;
    total += lse - target;
    const double p1 = std::exp(b - lse);
    const double p0 = std::exp(a - lse);
    r.grad[2 * i] = static_cast<T>((p0 - (labels[i] == 0 ? 1.0 : 0.0)) / static_cast<double>(n));
    r.grad[2 * i + 1] = static_cast<T>((p1 - (labels[i] == 1 ? 1.0 : 0.0)) / static_cast<double>(n));
  }
  r.loss = total / static_cast<double>(n);
  return r;
}

template <typename T>
std::vector<double> positive_probability(const Tensor<T>& logits) {
  require(logits.rank() == 2 && logits.dim(1) == 2, "expected (N, 2) logits");
  std::vector<double> p(logits.dim(0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = static_cast<double>(logits[2 * i + 1]) - static_cast<double>(logits[2 * i]);
    p[i] = 1.0 / (1.0 + std::exp(-d));
  }
  return p;
}

#define OAKNEE_INSTANTIATE(T)                                                                               \
  template Tensor<T> conv2d_forward(const Tensor<T>&, const Conv2dParams<T>&);                               \
  template Conv2dGrads<T> conv2d_backward(const Tensor<T>&, const Conv2dParams<T>&, const Tensor<T>&);       \
  template struct BatchNormParams<T>;                                                                        \
  template Tensor<T> batchnorm2d_forward(const Tensor<T>&, BatchNormParams<T>&, Mode, BatchNormCache<T>*);   \
  template BatchNormGrads<T> batchnorm2d_backward(const Tensor<T>&, const BatchNormParams<T>&,               \
                                                  const BatchNormCache<T>&);                                 \
  template Tensor<T> maxpool2x2_forward(const Tensor<T>&, std::vector<std::size_t>*);                        \
  template Tensor<T> maxpool2x2_backward(const Shape&, const std::vector<std::size_t>&, const Tensor<T>&);   \
  template Tensor<T> relu_forward(const Tensor<T>&);                                                         \
  template Tensor<T> relu_backward(const Tensor<T>&, const Tensor<T>&);                                      \
  template Tensor<T> linear_forward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                   \
  template LinearGrads<T> linear_backward(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);             \
  template Tensor<T> dropout_forward(const Tensor<T>&, double, Mode, Rng&, std::vector<T>*);                 \
  template LossResult<T> softmax_cross_entropy(const Tensor<T>&, const std::vector<int>&);                   \
  template std::vector<double> positive_probability(const Tensor<T>&);

OAKNEE_INSTANTIATE(float)
OAKNEE_INSTANTIATE(double)

#undef OAKNEE_INSTANTIATE

}  // namespace oaknee::nn
