#pragma once

#include <cmath>
#include <span>
#include <type_traits>
#include <string>
#include <vector>

#include "cwgan/matrix.hpp"
#include "cwgan/rng.hpp"

namespace cwgan {

// ============================================================================
// Parameters and layers
// ============================================================================

// Unit of optimization: value, accumulated gradient, and the RMSprop running
// average of squared gradients, all the same shape.
template <class T>
struct Parameter {
  Mat<T> value;
  Mat<T> grad;
  Mat<T> rms_cache;

  Parameter() = default;
  Parameter(int rows, int cols) : value(rows, cols), grad(rows, cols), rms_cache(rows, cols) {
    if (rows < 1 || cols < 1)
      throw ConfigError("parameter dims must be >= 1, got " + value.shape_str());
  }

  void zero_grad() { grad.fill(T{0}); }
};

template <class T>
struct DenseLayer {
  Parameter<T> weights;  // in x out
  Parameter<T> bias;     // 1 x out

  DenseLayer() = default;
  DenseLayer(int in_dim, int out_dim) : weights(in_dim, out_dim), bias(1, out_dim) {}

  int in_dim() const { return weights.value.rows; }
  int out_dim() const { return weights.value.cols; }
};

// Two-row table, one learned vector per class label.
template <class T>
struct EmbeddingTable {
  Parameter<T> table;  // 2 x dim

  EmbeddingTable() = default;
  explicit EmbeddingTable(int dim) : table(2, dim) {}

  int dim() const { return table.value.cols; }
};

inline void require_label(int label) {
  if (label != 0 && label != 1)
    throw LabelError("label must be 0 or 1, got " + std::to_string(label));
}

// ============================================================================
// Forward ops
// ============================================================================

template <class T>
Mat<T> dense_forward(const Mat<T>& input, const DenseLayer<T>& layer) {
  if (input.cols != layer.in_dim())
    throw ShapeError("dense_forward: input " + input.shape_str() + " vs weights " +
                     layer.weights.value.shape_str());
  Mat<T> out = matmul(input, layer.weights.value);
  add_row_inplace(out, layer.bias.value);
  return out;
}

template <class T>
Mat<T> leaky_relu(const Mat<T>& x, T alpha) {
  if (!(alpha > T{0} && alpha < T{1}))
    throw ConfigError("leaky_relu: alpha must be in (0,1)");
  Mat<T> y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const T v = x.data[i];
    y.data[i] = v >= T{0} ? v : alpha * v;
  }
  return y;
}

template <class T>
Mat<T> tanh_activation(const Mat<T>& x) {
  Mat<T> y(x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) y.data[i] = std::tanh(x.data[i]);
  return y;
}

template <class T>
Mat<T> embedding_lookup(std::span<const int> labels, const EmbeddingTable<T>& table) {
  Mat<T> out(static_cast<int>(labels.size()), table.dim());
  for (int b = 0; b < out.rows; ++b) {
    require_label(labels[b]);
    const T* src = table.table.value.row(labels[b]);
    std::copy(src, src + table.dim(), out.row(b));
  }
  return out;
}

// ============================================================================
// Backward ops. Each takes the values cached by the matching forward and the
// upstream gradient, and accumulates into Parameter::grad.
// ============================================================================

// Returns d(input) unless d_input is null. `accumulate_params` false leaves
// the layer's gradients untouched (frozen critic path).
template <class T>
void dense_backward(const Mat<T>& input, DenseLayer<T>& layer, const Mat<T>& d_out,
                    std::type_identity_t<Mat<T>>* d_input, bool accumulate_params = true) {
  if (d_out.rows != input.rows || d_out.cols != layer.out_dim())
    throw ShapeError("dense_backward: d_out " + d_out.shape_str());
  if (accumulate_params) {
    Mat<T> dw = matmul_tn(input, d_out);
    for (std::size_t i = 0; i < dw.size(); ++i) layer.weights.grad.data[i] += dw.data[i];
    Mat<T> db = col_sum(d_out);
    for (std::size_t i = 0; i < db.size(); ++i) layer.bias.grad.data[i] += db.data[i];
  }
  if (d_input) *d_input = matmul_nt(d_out, layer.weights.value);
}

// leaky_relu keeps the sign of its input (alpha > 0), so the cached output is
// enough to pick the branch.
template <class T>
Mat<T> leaky_relu_backward(const Mat<T>& y, const Mat<T>& d_y, T alpha) {
  detail::require_same_shape(y, d_y, "leaky_relu_backward");
  Mat<T> dx(y.rows, y.cols);
  for (std::size_t i = 0; i < y.size(); ++i)
    dx.data[i] = y.data[i] >= T{0} ? d_y.data[i] : alpha * d_y.data[i];
  return dx;
}

template <class T>
Mat<T> tanh_backward(const Mat<T>& y, const Mat<T>& d_y) {
  detail::require_same_shape(y, d_y, "tanh_backward");
  Mat<T> dx(y.rows, y.cols);
  for (std::size_t i = 0; i < y.size(); ++i)
    dx.data[i] = (T{1} - y.data[i] * y.data[i]) * d_y.data[i];
  return dx;
}

// Scatters row gradients into the looked-up table rows; untouched rows keep
// zero gradient.
template <class T>
void embedding_backward(std::span<const int> labels, EmbeddingTable<T>& table, const Mat<T>& d_out) {
  if (d_out.rows != static_cast<int>(labels.size()) || d_out.cols != table.dim())
    throw ShapeError("embedding_backward: d_out " + d_out.shape_str());
  for (int b = 0; b < d_out.rows; ++b) {
    require_label(labels[b]);
    T* dst = table.table.grad.row(labels[b]);
    const T* src = d_out.row(b);
    for (int j = 0; j < d_out.cols; ++j) dst[j] += src[j];
  }
}

// ============================================================================
// Optimizer and clipping
// ============================================================================

// cache <- rho*cache + (1-rho)*g^2; value <- value - lr*g/(sqrt(cache)+eps).
// The gradient is zeroed afterwards. lr == 0 leaves the value untouched while
// the cache still decays. The finiteness scan runs before the update so a
// divergence error never leaves a half-updated parameter, and the update
// loop itself stays branch-free.
template <class T>
void rmsprop_step(Parameter<T>& p, T lr, T rho, T eps) {
  if (!(lr >= T{0})) throw ConfigError("rmsprop: lr must be >= 0");
  if (!(rho > T{0} && rho < T{1})) throw ConfigError("rmsprop: rho must be in (0,1)");
  if (!(eps > T{0})) throw ConfigError("rmsprop: eps must be > 0");
  const std::size_t size = p.value.size();
  const T* __restrict__ grad = p.grad.data.data();
  for (std::size_t i = 0; i < size; ++i)
    if (!std::isfinite(grad[i])) throw DivergenceError("rmsprop: non-finite gradient");

  const T one_minus_rho = T{1} - rho;
  T* __restrict__ value = p.value.data.data();
  T* __restrict__ cache = p.rms_cache.data.data();
  for (std::size_t i = 0; i < size; ++i) {
    const T g = grad[i];
    const T c = rho * cache[i] + one_minus_rho * g * g;
    cache[i] = c;
    value[i] -= lr * g / (std::sqrt(c) + eps);
  }
  p.grad.fill(T{0});
}

template <class T>
void clip_parameters(std::span<Parameter<T>* const> params, T c) {
  if (!(c > T{0})) throw ConfigError("clip: c must be > 0");
  for (Parameter<T>* p : params)
    for (T& v : p->value.data) v = std::clamp(v, -c, c);
}

// ============================================================================
// Initialization: fan-in-scaled normal for dense weights (LeakyReLU gain),
// zero biases, small uniform embedding rows. Deterministic given the rng.
// ============================================================================

template <class T>
void init_dense(DenseLayer<T>& layer, Rng& rng) {
  const double std_dev = std::sqrt(2.0 / static_cast<double>(layer.in_dim()));
  for (T& w : layer.weights.value.data) w = static_cast<T>(rng.normal() * std_dev);
  layer.bias.value.fill(T{0});
}

template <class T>
void init_embedding(EmbeddingTable<T>& emb, Rng& rng) {
  for (T& w : emb.table.value.data) w = static_cast<T>(rng.uniform(-0.05, 0.05));
}

}  // namespace cwgan
