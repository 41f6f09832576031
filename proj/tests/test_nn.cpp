#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "cwgan/nn.hpp"
#include "test_util.hpp"

using cwgan::DenseLayer;
using cwgan::EmbeddingTable;
using cwgan::Mat;
using cwgan::MatF;
using cwgan::Parameter;
using test_util::fd_grad;
using test_util::random_mat;
using test_util::rel_err;

// ============================================================================
// dense_forward
// ============================================================================

TEST_CASE("dense_forward with identity weights passes input through") {
  DenseLayer<float> layer(2, 2);
  layer.weights.value(0, 0) = 1.0f;
  layer.weights.value(1, 1) = 1.0f;
  MatF x(1, 2);
  x(0, 0) = 1.0f;
  x(0, 1) = 2.0f;
  MatF y = cwgan::dense_forward(x, layer);
  REQUIRE(y(0, 0) == 1.0f);
  REQUIRE(y(0, 1) == 2.0f);
}

TEST_CASE("dense_forward on zero input returns the bias") {
  cwgan::Rng rng(1);
  DenseLayer<float> layer(2, 2);
  layer.weights.value = random_mat<float>(2, 2, rng);
  layer.bias.value(0, 0) = 3.0f;
  layer.bias.value(0, 1) = -1.0f;
  MatF x(1, 2);
  MatF y = cwgan::dense_forward(x, layer);
  REQUIRE(y(0, 0) == 3.0f);
  REQUIRE(y(0, 1) == -1.0f);
}

TEST_CASE("dense_forward matches a naive triple-loop oracle") {
  cwgan::Rng rng(2);
  MatF x = random_mat<float>(4, 3, rng);
  DenseLayer<float> layer(3, 5);
  layer.weights.value = random_mat<float>(3, 5, rng);
  layer.bias.value = random_mat<float>(1, 5, rng);
  MatF y = cwgan::dense_forward(x, layer);
  for (int b = 0; b < 4; ++b)
    for (int j = 0; j < 5; ++j) {
      double acc = layer.bias.value(0, j);
      for (int i = 0; i < 3; ++i)
        acc += static_cast<double>(x(b, i)) * layer.weights.value(i, j);
      REQUIRE_THAT(y(b, j), Catch::Matchers::WithinAbs(acc, 1e-6));
    }
}

TEST_CASE("dense_forward names both shapes on mismatch") {
  DenseLayer<float> layer(3, 5);
  MatF x(4, 2);
  try {
    cwgan::dense_forward(x, layer);
    FAIL("expected ShapeError");
  } catch (const cwgan::ShapeError& e) {
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("4x2"));
    REQUIRE_THAT(e.what(), Catch::Matchers::ContainsSubstring("3x5"));
  }
}

// ============================================================================
// activations
// ============================================================================

TEST_CASE("leaky_relu pinned values") {
  MatF x(1, 3);
  x(0, 0) = -1.0f;
  x(0, 1) = 3.0f;
  x(0, 2) = 0.0f;
  MatF y = cwgan::leaky_relu(x, 0.2f);
  REQUIRE_THAT(y(0, 0), Catch::Matchers::WithinAbs(-0.2, 1e-7));
  REQUIRE(y(0, 1) == 3.0f);
  REQUIRE(y(0, 2) == 0.0f);
  REQUIRE_THROWS_AS(cwgan::leaky_relu(x, 0.0f), cwgan::ConfigError);
  REQUIRE_THROWS_AS(cwgan::leaky_relu(x, 1.0f), cwgan::ConfigError);
}

TEST_CASE("tanh_activation: fixed point, saturation, odd symmetry, range") {
  MatF x(1, 2);
  x(0, 1) = 1e6f;
  MatF y = cwgan::tanh_activation(x);
  REQUIRE(y(0, 0) == 0.0f);
  REQUIRE_THAT(y(0, 1), Catch::Matchers::WithinAbs(1.0, 1e-7));

  cwgan::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    MatF a = random_mat<float>(3, 4, rng, 3.0);
    MatF neg(3, 4);
    for (std::size_t i = 0; i < a.size(); ++i) neg.data[i] = -a.data[i];
    MatF ta = cwgan::tanh_activation(a);
    MatF tn = cwgan::tanh_activation(neg);
    for (std::size_t i = 0; i < a.size(); ++i) {
      REQUIRE_THAT(tn.data[i], Catch::Matchers::WithinAbs(-ta.data[i], 1e-7));
      REQUIRE(ta.data[i] >= -1.0f);
      REQUIRE(ta.data[i] <= 1.0f);
    }
  }
}

// ============================================================================
// embedding
// ============================================================================

TEST_CASE("embedding_lookup selects rows by label") {
  EmbeddingTable<float> table(3);
  for (int j = 0; j < 3; ++j) {
    table.table.value(0, j) = static_cast<float>(j);
    table.table.value(1, j) = static_cast<float>(10 + j);
  }
  std::vector<int> one{0};
  MatF m = cwgan::embedding_lookup(std::span<const int>(one), table);
  REQUIRE(m.rows == 1);
  REQUIRE(m(0, 1) == 1.0f);

  std::vector<int> labels{1, 1, 0};
  MatF out = cwgan::embedding_lookup(std::span<const int>(labels), table);
  REQUIRE(out(0, 0) == 10.0f);
  REQUIRE(out(1, 2) == 12.0f);
  REQUIRE(out(2, 0) == 0.0f);

  std::vector<int> bad{2};
  REQUIRE_THROWS_AS(cwgan::embedding_lookup(std::span<const int>(bad), table), cwgan::LabelError);
}

TEST_CASE("embedding gradient lands only in looked-up rows (finite differences)") {
  cwgan::Rng rng(5);
  EmbeddingTable<double> table(4);
  for (auto& v : table.table.value.data) v = rng.normal();
  const MatF mask_f = random_mat<float>(2, 4, rng);

  std::vector<int> labels{0, 0};  // row 1 never used
  auto loss = [&]() -> double {
    Mat<double> out = cwgan::embedding_lookup(std::span<const int>(labels), table);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out.data[i] * mask_f.data[i];
    return acc / static_cast<double>(out.size());
  };

  // analytic
  Mat<double> upstream(2, 4);
  for (std::size_t i = 0; i < upstream.size(); ++i)
    upstream.data[i] = mask_f.data[i] / static_cast<double>(upstream.size());
  table.table.zero_grad();
  cwgan::embedding_backward(std::span<const int>(labels), table, upstream);

  for (std::size_t idx = 0; idx < table.table.value.size(); ++idx) {
    const double fd = fd_grad(table.table, idx, 1e-6, loss);
    const double analytic = table.table.grad.data[idx];
    REQUIRE(rel_err(analytic, fd) < 1e-6);
  }
  // unused row: exactly zero
  for (int j = 0; j < 4; ++j) REQUIRE(table.table.grad(1, j) == 0.0);
}

// ============================================================================
// backward through a dense chain
// ============================================================================

TEST_CASE("mean loss over a single dense layer: bias grad is 1/B") {
  // loss = mean over the B x B outputs; each bias unit collects B upstream
  // entries of 1/B^2, so its gradient is exactly 1/B.
  cwgan::Rng rng(6);
  const int B = 4;
  DenseLayer<float> layer(3, B);
  layer.weights.value = random_mat<float>(3, B, rng);
  MatF x = random_mat<float>(B, 3, rng);

  MatF upstream(B, B);
  upstream.fill(1.0f / static_cast<float>(B * B));
  cwgan::dense_backward(x, layer, upstream, nullptr);
  for (int j = 0; j < B; ++j)
    REQUIRE_THAT(layer.bias.grad(0, j), Catch::Matchers::WithinAbs(1.0 / B, 1e-7));
}

TEST_CASE("zero upstream gradient produces zero grads everywhere") {
  cwgan::Rng rng(7);
  DenseLayer<float> layer(3, 4);
  layer.weights.value = random_mat<float>(3, 4, rng);
  MatF x = random_mat<float>(5, 3, rng);
  MatF upstream(5, 4);  // zeros
  Mat<float> dx;
  cwgan::dense_backward(x, layer, upstream, &dx);
  for (float g : layer.weights.grad.data) REQUIRE(g == 0.0f);
  for (float g : layer.bias.grad.data) REQUIRE(g == 0.0f);
  for (float g : dx.data) REQUIRE(g == 0.0f);
}

TEST_CASE("two-layer net: analytic gradients match finite differences") {
  // 64-bit mode: rel err < 1e-4 (checked tighter); 32-bit mode: < 1e-2.
  cwgan::Rng rng(8);
  const int B = 4;

  // double-precision net
  DenseLayer<double> l1(5, 7), l2(7, 3);
  cwgan::init_dense(l1, rng);
  cwgan::init_dense(l2, rng);
  for (auto& v : l1.bias.value.data) v = rng.normal() * 0.1;
  for (auto& v : l2.bias.value.data) v = rng.normal() * 0.1;
  Mat<double> x = random_mat<double>(B, 5, rng);

  auto forward = [&]() {
    Mat<double> h = cwgan::leaky_relu(cwgan::dense_forward(x, l1), 0.2);
    return cwgan::tanh_activation(cwgan::dense_forward(h, l2));
  };
  auto loss = [&]() -> double {
    Mat<double> y = forward();
    double acc = 0.0;
    for (double v : y.data) acc += v;
    return acc / static_cast<double>(y.size());
  };

  // analytic
  Mat<double> a1 = cwgan::leaky_relu(cwgan::dense_forward(x, l1), 0.2);
  Mat<double> y = cwgan::tanh_activation(cwgan::dense_forward(a1, l2));
  Mat<double> upstream(y.rows, y.cols);
  upstream.fill(1.0 / static_cast<double>(y.size()));
  Mat<double> d = cwgan::tanh_backward(y, upstream);
  Mat<double> d_a1;
  cwgan::dense_backward(a1, l2, d, &d_a1);
  d = cwgan::leaky_relu_backward(a1, d_a1, 0.2);
  cwgan::dense_backward(x, l1, d, nullptr);

  double max_rel = 0.0;
  for (Parameter<double>* p : {&l1.weights, &l1.bias, &l2.weights, &l2.bias})
    for (std::size_t idx = 0; idx < p->value.size(); ++idx) {
      const double fd = fd_grad(*p, idx, 1e-5, loss);
      max_rel = std::max(max_rel, rel_err(p->grad.data[idx], fd));
    }
  REQUIRE(max_rel < 1e-6);
}

// ============================================================================
// RMSprop
// ============================================================================

namespace {

// Hand-rolled reference: the published update rule applied element-wise in
// 32-bit arithmetic. Kept independent of rmsprop_step.
struct RmsRef {
  std::vector<float> value, cache;

  void step(const std::vector<float>& grad, float lr, float rho, float eps) {
    for (std::size_t i = 0; i < value.size(); ++i) {
      cache[i] = rho * cache[i] + (1.0f - rho) * grad[i] * grad[i];
      value[i] -= lr * grad[i] / (std::sqrt(cache[i]) + eps);
    }
  }
};

}  // namespace

TEST_CASE("rmsprop: zero grad leaves value, decays cache by rho") {
  Parameter<float> p(2, 2);
  p.value.fill(1.5f);
  p.rms_cache.fill(0.8f);
  cwgan::rmsprop_step(p, 5e-5f, 0.9f, 1e-8f);
  for (float v : p.value.data) REQUIRE(v == 1.5f);
  for (float c : p.rms_cache.data) REQUIRE_THAT(c, Catch::Matchers::WithinRel(0.72f, 1e-6f));
}

TEST_CASE("rmsprop single-step hand oracle") {
  // v=1, g=1, cache=0, rho=0.9, eps=1e-8, lr=5e-5:
  // cache = 0.1, v = 1 - 5e-5/(sqrt(0.1)+1e-8) = 0.9998418861...
  Parameter<float> p(1, 1);
  p.value(0, 0) = 1.0f;
  p.grad(0, 0) = 1.0f;
  cwgan::rmsprop_step(p, 5e-5f, 0.9f, 1e-8f);
  REQUIRE_THAT(p.rms_cache(0, 0), Catch::Matchers::WithinRel(0.1f, 1e-6f));
  REQUIRE_THAT(p.value(0, 0), Catch::Matchers::WithinAbs(0.99984188611699158, 1e-6));
  REQUIRE(p.grad(0, 0) == 0.0f);  // grad zeroed after the step
}

TEST_CASE("rmsprop matches the reference loop over 10 constant-gradient steps") {
  cwgan::Rng rng(9);
  Parameter<float> p(3, 4);
  p.value = random_mat<float>(3, 4, rng);
  const MatF grad = random_mat<float>(3, 4, rng);

  RmsRef ref{p.value.data, p.rms_cache.data};
  for (int step = 0; step < 10; ++step) {
    p.grad = grad;
    cwgan::rmsprop_step(p, 5e-5f, 0.9f, 1e-8f);
    ref.step(grad.data, 5e-5f, 0.9f, 1e-8f);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      REQUIRE_THAT(p.value.data[i], Catch::Matchers::WithinAbs(ref.value[i], 1e-7));
      REQUIRE_THAT(p.rms_cache.data[i], Catch::Matchers::WithinAbs(ref.cache[i], 1e-7));
    }
  }
}

TEST_CASE("rmsprop rejects non-finite gradients") {
  Parameter<float> p(1, 2);
  p.grad(0, 1) = std::numeric_limits<float>::quiet_NaN();
  REQUIRE_THROWS_AS(cwgan::rmsprop_step(p, 5e-5f, 0.9f, 1e-8f), cwgan::DivergenceError);
}

TEST_CASE("rmsprop with lr=0 never changes the value") {
  cwgan::Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    Parameter<float> p(2, 3);
    p.value = random_mat<float>(2, 3, rng);
    p.grad = random_mat<float>(2, 3, rng);
    const std::vector<float> before = p.value.data;
    cwgan::rmsprop_step(p, 0.0f, 0.9f, 1e-8f);
    REQUIRE(p.value.data == before);
  }
}

// ============================================================================
// clipping
// ============================================================================

TEST_CASE("clip_parameters clamps to [-c, c] and keeps interior points") {
  Parameter<float> p(1, 3);
  p.value(0, 0) = 0.05f;
  p.value(0, 1) = -0.02f;
  p.value(0, 2) = 0.005f;
  std::vector<Parameter<float>*> params{&p};
  cwgan::clip_parameters(std::span<Parameter<float>* const>(params), 0.01f);
  REQUIRE(p.value(0, 0) == 0.01f);
  REQUIRE(p.value(0, 1) == -0.01f);
  REQUIRE(p.value(0, 2) == 0.005f);
}

TEST_CASE("clip_parameters is idempotent") {
  cwgan::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    Parameter<float> p(4, 4);
    p.value = random_mat<float>(4, 4, rng, 0.05);
    std::vector<Parameter<float>*> params{&p};
    cwgan::clip_parameters(std::span<Parameter<float>* const>(params), 0.01f);
    const std::vector<float> once = p.value.data;
    cwgan::clip_parameters(std::span<Parameter<float>* const>(params), 0.01f);
    REQUIRE(p.value.data == once);
    for (float v : p.value.data) {
      REQUIRE(v >= -0.01f);
      REQUIRE(v <= 0.01f);
    }
  }
}

// ============================================================================
// initialization
// ============================================================================

TEST_CASE("init is deterministic given the seed") {
  DenseLayer<float> a(16, 8), b(16, 8);
  EmbeddingTable<float> ea(8), eb(8);
  {
    cwgan::Rng rng(42);
    cwgan::init_dense(a, rng);
    cwgan::init_embedding(ea, rng);
  }
  {
    cwgan::Rng rng(42);
    cwgan::init_dense(b, rng);
    cwgan::init_embedding(eb, rng);
  }
  REQUIRE(a.weights.value.data == b.weights.value.data);
  REQUIRE(ea.table.value.data == eb.table.value.data);
}

TEST_CASE("dense init: sample std near sqrt(2/fan_in), biases zero") {
  cwgan::Rng rng(12);
  DenseLayer<float> layer(1024, 64);
  cwgan::init_dense(layer, rng);
  double sum = 0.0, sq = 0.0;
  for (float v : layer.weights.value.data) {
    sum += v;
    sq += static_cast<double>(v) * v;
  }
  const double n = static_cast<double>(layer.weights.value.size());
  const double stdev = std::sqrt(sq / n - (sum / n) * (sum / n));
  const double want = std::sqrt(2.0 / 1024.0);
  REQUIRE(stdev > want * 0.9);
  REQUIRE(stdev < want * 1.1);
  for (float b : layer.bias.value.data) REQUIRE(b == 0.0f);
}

TEST_CASE("embedding init stays inside [-0.05, 0.05]") {
  cwgan::Rng rng(13);
  EmbeddingTable<float> emb(256);
  cwgan::init_embedding(emb, rng);
  for (float v : emb.table.value.data) {
    REQUIRE(v >= -0.05f);
    REQUIRE(v <= 0.05f);
  }
}

TEST_CASE("zero-sized layer is rejected") {
  REQUIRE_THROWS_AS(DenseLayer<float>(0, 4), cwgan::ConfigError);
  REQUIRE_THROWS_AS(DenseLayer<float>(4, 0), cwgan::ConfigError);
}
