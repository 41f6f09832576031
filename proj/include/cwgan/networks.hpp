#pragma once

#include <span>
#include <vector>

#include "cwgan/nn.hpp"

namespace cwgan {

inline constexpr float kLeakyAlpha = 0.2f;

// Generator: z (latent) conditioned by multiplying in the label embedding,
// then 256 -> 512 -> 1024 LeakyReLU dense layers and a tanh output layer of
// seg_len units.
template <class T>
struct GeneratorNet {
  EmbeddingTable<T> label_embed;  // 2 x latent_dim
  DenseLayer<T> fc1, fc2, fc3;    // latent -> 256 -> 512 -> 1024
  DenseLayer<T> out;              // 1024 -> seg_len
  int latent_dim = 0;
  int seg_len = 0;

  GeneratorNet() = default;
  GeneratorNet(int latent, int segment_len)
      : label_embed(latent),
        fc1(latent, 256),
        fc2(256, 512),
        fc3(512, 1024),
        out(1024, segment_len),
        latent_dim(latent),
        seg_len(segment_len) {}

  std::vector<Parameter<T>*> parameters() {
    return {&label_embed.table, &fc1.weights, &fc1.bias, &fc2.weights, &fc2.bias,
            &fc3.weights,       &fc3.bias,    &out.weights, &out.bias};
  }
  std::vector<const Parameter<T>*> parameters() const {
    return {&label_embed.table, &fc1.weights, &fc1.bias, &fc2.weights, &fc2.bias,
            &fc3.weights,       &fc3.bias,    &out.weights, &out.bias};
  }
};

// Critic: segment x conditioned the same way (embedding of length seg_len),
// then 1024 -> 512 -> 256 LeakyReLU layers and one linear unit. The score is
// unbounded on purpose.
template <class T>
struct CriticNet {
  EmbeddingTable<T> label_embed;  // 2 x seg_len
  DenseLayer<T> fc1, fc2, fc3;    // seg_len -> 1024 -> 512 -> 256
  DenseLayer<T> out;              // 256 -> 1
  int seg_len = 0;

  CriticNet() = default;
  explicit CriticNet(int segment_len)
      : label_embed(segment_len),
        fc1(segment_len, 1024),
        fc2(1024, 512),
        fc3(512, 256),
        out(256, 1),
        seg_len(segment_len) {}

  std::vector<Parameter<T>*> parameters() {
    return {&label_embed.table, &fc1.weights, &fc1.bias, &fc2.weights, &fc2.bias,
            &fc3.weights,       &fc3.bias,    &out.weights, &out.bias};
  }
  std::vector<const Parameter<T>*> parameters() const {
    return {&label_embed.table, &fc1.weights, &fc1.bias, &fc2.weights, &fc2.bias,
            &fc3.weights,       &fc3.bias,    &out.weights, &out.bias};
  }
};

template <class T>
void init_generator(GeneratorNet<T>& g, Rng& rng) {
  init_embedding(g.label_embed, rng);
  init_dense(g.fc1, rng);
  init_dense(g.fc2, rng);
  init_dense(g.fc3, rng);
  init_dense(g.out, rng);
}

template <class T>
void init_critic(CriticNet<T>& c, Rng& rng) {
  init_embedding(c.label_embed, rng);
  init_dense(c.fc1, rng);
  init_dense(c.fc2, rng);
  init_dense(c.fc3, rng);
  init_dense(c.out, rng);
}

// ============================================================================
// Forward passes. The cached variants record every intermediate needed by the
// matching backward; the plain variants are pure and allocate less.
// ============================================================================

template <class T>
struct GenCache {
  Mat<T> z;
  std::vector<int> labels;
  Mat<T> embedded;  // rows of the table, one per sample
  Mat<T> h0;        // z (x) embed
  Mat<T> a1, a2, a3;
  Mat<T> y;
  bool recorded = false;
};

template <class T>
struct CriticCache {
  Mat<T> x;
  std::vector<int> labels;
  Mat<T> embedded;
  Mat<T> h0;  // x (x) embed
  Mat<T> a1, a2, a3;
  bool recorded = false;
};

template <class T>
Mat<T> generator_forward(const GeneratorNet<T>& g, const Mat<T>& z, std::span<const int> labels) {
  if (z.cols != g.latent_dim)
    throw ShapeError("generator_forward: z " + z.shape_str() + ", want cols " +
                     std::to_string(g.latent_dim));
  if (z.rows != static_cast<int>(labels.size()))
    throw ShapeError("generator_forward: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(z.rows) + " rows");
  Mat<T> h = hadamard(z, embedding_lookup(labels, g.label_embed));
  h = leaky_relu(dense_forward(h, g.fc1), T(kLeakyAlpha));
  h = leaky_relu(dense_forward(h, g.fc2), T(kLeakyAlpha));
  h = leaky_relu(dense_forward(h, g.fc3), T(kLeakyAlpha));
  return tanh_activation(dense_forward(h, g.out));
}

template <class T>
GenCache<T> generator_forward_cached(const GeneratorNet<T>& g, const Mat<T>& z,
                                     std::span<const int> labels) {
  if (z.cols != g.latent_dim)
    throw ShapeError("generator_forward: z " + z.shape_str() + ", want cols " +
                     std::to_string(g.latent_dim));
  if (z.rows != static_cast<int>(labels.size()))
    throw ShapeError("generator_forward: label count mismatch");
  GenCache<T> cache;
  cache.z = z;
  cache.labels.assign(labels.begin(), labels.end());
  cache.embedded = embedding_lookup(labels, g.label_embed);
  cache.h0 = hadamard(z, cache.embedded);
  cache.a1 = leaky_relu(dense_forward(cache.h0, g.fc1), T(kLeakyAlpha));
  cache.a2 = leaky_relu(dense_forward(cache.a1, g.fc2), T(kLeakyAlpha));
  cache.a3 = leaky_relu(dense_forward(cache.a2, g.fc3), T(kLeakyAlpha));
  cache.y = tanh_activation(dense_forward(cache.a3, g.out));
  cache.recorded = true;
  return cache;
}

// Accumulates parameter gradients for the composite recorded in `cache`.
template <class T>
void generator_backward(GeneratorNet<T>& g, const GenCache<T>& cache, const Mat<T>& d_y) {
  if (!cache.recorded) throw StateError("generator_backward: no recorded forward");
  detail::require_same_shape(cache.y, d_y, "generator_backward");

  Mat<T> d = tanh_backward(cache.y, d_y);
  Mat<T> d_a3;
  dense_backward(cache.a3, g.out, d, &d_a3);
  d = leaky_relu_backward(cache.a3, d_a3, T(kLeakyAlpha));
  Mat<T> d_a2;
  dense_backward(cache.a2, g.fc3, d, &d_a2);
  d = leaky_relu_backward(cache.a2, d_a2, T(kLeakyAlpha));
  Mat<T> d_a1;
  dense_backward(cache.a1, g.fc2, d, &d_a1);
  d = leaky_relu_backward(cache.a1, d_a1, T(kLeakyAlpha));
  Mat<T> d_h0;
  dense_backward(cache.h0, g.fc1, d, &d_h0);
  // h0 = z (x) embed: the embedding rows see d_h0 (x) z.
  embedding_backward(std::span<const int>(cache.labels), g.label_embed, hadamard(d_h0, cache.z));
}

template <class T>
std::vector<T> scores_from_column(const Mat<T>& col) {
  std::vector<T> s(col.rows);
  for (int i = 0; i < col.rows; ++i) s[i] = col(i, 0);
  return s;
}

template <class T>
std::vector<T> critic_forward(const CriticNet<T>& c, const Mat<T>& x, std::span<const int> labels) {
  if (x.cols != c.seg_len)
    throw ShapeError("critic_forward: x " + x.shape_str() + ", want cols " +
                     std::to_string(c.seg_len));
  if (x.rows != static_cast<int>(labels.size()))
    throw ShapeError("critic_forward: label count mismatch");
  Mat<T> h = hadamard(x, embedding_lookup(labels, c.label_embed));
  h = leaky_relu(dense_forward(h, c.fc1), T(kLeakyAlpha));
  h = leaky_relu(dense_forward(h, c.fc2), T(kLeakyAlpha));
  h = leaky_relu(dense_forward(h, c.fc3), T(kLeakyAlpha));
  return scores_from_column(dense_forward(h, c.out));
}

template <class T>
CriticCache<T> critic_forward_cached(const CriticNet<T>& c, const Mat<T>& x,
                                     std::span<const int> labels, std::vector<T>* scores) {
  if (x.cols != c.seg_len)
    throw ShapeError("critic_forward: x " + x.shape_str() + ", want cols " +
                     std::to_string(c.seg_len));
  if (x.rows != static_cast<int>(labels.size()))
    throw ShapeError("critic_forward: label count mismatch");
  CriticCache<T> cache;
  cache.x = x;
  cache.labels.assign(labels.begin(), labels.end());
  cache.embedded = embedding_lookup(labels, c.label_embed);
  cache.h0 = hadamard(x, cache.embedded);
  cache.a1 = leaky_relu(dense_forward(cache.h0, c.fc1), T(kLeakyAlpha));
  cache.a2 = leaky_relu(dense_forward(cache.a1, c.fc2), T(kLeakyAlpha));
  cache.a3 = leaky_relu(dense_forward(cache.a2, c.fc3), T(kLeakyAlpha));
  if (scores) *scores = scores_from_column(dense_forward(cache.a3, c.out));
  cache.recorded = true;
  return cache;
}

// Backward through the critic. Returns d(x), which the generator update feeds
// into generator_backward. With accumulate_params false the critic stays
// frozen: its gradients are untouched.
template <class T>
Mat<T> critic_backward(CriticNet<T>& c, const CriticCache<T>& cache,
                       std::span<const T> d_scores, bool accumulate_params = true) {
  if (!cache.recorded) throw StateError("critic_backward: no recorded forward");
  if (static_cast<int>(d_scores.size()) != cache.x.rows)
    throw ShapeError("critic_backward: upstream size mismatch");

  Mat<T> d(cache.x.rows, 1);
  for (int i = 0; i < d.rows; ++i) d(i, 0) = d_scores[i];

  Mat<T> d_a3;
  dense_backward(cache.a3, c.out, d, &d_a3, accumulate_params);
  Mat<T> t = leaky_relu_backward(cache.a3, d_a3, T(kLeakyAlpha));
  Mat<T> d_a2;
  dense_backward(cache.a2, c.fc3, t, &d_a2, accumulate_params);
  t = leaky_relu_backward(cache.a2, d_a2, T(kLeakyAlpha));
  Mat<T> d_a1;
  dense_backward(cache.a1, c.fc2, t, &d_a1, accumulate_params);
  t = leaky_relu_backward(cache.a1, d_a1, T(kLeakyAlpha));
  Mat<T> d_h0;
  dense_backward(cache.h0, c.fc1, t, &d_h0, accumulate_params);
  if (accumulate_params)
    embedding_backward(std::span<const int>(cache.labels), c.label_embed,
                       hadamard(d_h0, cache.x));
  // h0 = x (x) embed, so d(x) = d_h0 (x) embed.
  return hadamard(d_h0, cache.embedded);
}

// i.i.d. standard normal latent batch.
template <class T>
Mat<T> sample_latent(Rng& rng, int batch, int dim) {
  if (batch < 1 || dim < 1) throw ConfigError("sample_latent: batch and dim must be >= 1");
  Mat<T> z(batch, dim);
  for (T& v : z.data) v = static_cast<T>(rng.normal());
  return z;
}

}  // namespace cwgan
