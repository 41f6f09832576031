#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cwgan/data.hpp"
#include "cwgan/networks.hpp"

namespace cwgan {

// Hyperparameters of the training routine. Defaults are the published
// recipe: five critic updates per generator update, batches of 64, RMSprop
// at 5e-5, weights clipped to [-0.01, 0.01], 300 epochs.
struct TrainConfig {
  int latent_dim = 100;
  int n_critic = 5;
  int batch = 64;
  double lr = 5e-5;
  double rho = 0.9;
  double eps = 1e-8;
  double clip_c = 0.01;
  int epochs = 300;
  int log_every = 100;         // epochs between log records
  bool log_each_epoch = false; // additionally record every epoch
  std::uint64_t seed = 42;

  void validate() const {
    if (latent_dim < 1) throw ConfigError("latent_dim must be >= 1");
    if (n_critic < 1) throw ConfigError("n_critic must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (!(lr > 0)) throw ConfigError("lr must be > 0");
    if (!(rho > 0 && rho < 1)) throw ConfigError("rho must be in (0,1)");
    if (!(eps > 0)) throw ConfigError("eps must be > 0");
    if (!(clip_c > 0)) throw ConfigError("clip_c must be > 0");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (log_every < 1) throw ConfigError("log_every must be >= 1");
  }
};

struct LogRecord {
  int epoch = 0;
  double d_loss = 0.0;  // mean(real scores) - mean(fake scores)
  double g_loss = 0.0;  // -mean(fake scores)
};

struct TrainingLog {
  std::vector<LogRecord> records;

  void append(int epoch, double d_loss, double g_loss) {
    if (!records.empty() && epoch <= records.back().epoch)
      throw StateError("training log epochs must be strictly increasing");
    records.push_back({epoch, d_loss, g_loss});
  }
};

// ============================================================================
// Wasserstein losses. The critic maximizes mean(real) - mean(fake); we
// minimize the negation and log the positive-signed value. Means accumulate
// in double.
// ============================================================================

template <class T>
double mean_of(std::span<const T> v) {
  double s = 0.0;
  for (const T& x : v) s += static_cast<double>(x);
  return s / static_cast<double>(v.size());
}

// Value the critic optimizer minimizes: -(mean(real) - mean(fake)).
template <class T>
double critic_loss(std::span<const T> real_scores, std::span<const T> fake_scores) {
  if (real_scores.empty() || fake_scores.empty())
    throw ConfigError("critic_loss: empty score vector");
  return mean_of(fake_scores) - mean_of(real_scores);
}

template <class T>
double generator_loss(std::span<const T> fake_scores) {
  if (fake_scores.empty()) throw ConfigError("generator_loss: empty score vector");
  return -mean_of(fake_scores);
}

// Losses returned by one train_iteration; d_loss carries the logged sign.
struct IterationLosses {
  double d_loss = 0.0;
  double g_loss = 0.0;
};

// Optional instrumentation. after_critic_update fires once per critic update,
// after clipping; test suites use it to assert the clip invariant.
template <class T>
struct TrainHooks {
  std::function<void(const CriticNet<T>&, long iteration, int critic_step)> after_critic_update;
};

// ============================================================================
// One training iteration: n_critic critic updates (each on a fresh real batch
// and fresh noise, fakes conditioned on the real batch's labels, weights
// clipped after the optimizer step), then one generator update through the
// frozen critic on fresh noise and uniform labels.
// ============================================================================

template <class T>
IterationLosses train_iteration(GeneratorNet<T>& gen, CriticNet<T>& critic, const Dataset& ds,
                                const TrainConfig& cfg, Rng& rng,
                                const TrainHooks<T>* hooks = nullptr, long iteration = 0) {
  cfg.validate();
  const int B = cfg.batch;
  const T inv_b = T{1} / static_cast<T>(B);
  auto critic_params = critic.parameters();
  auto gen_params = gen.parameters();

  IterationLosses losses;
  for (int step = 0; step < cfg.n_critic; ++step) {
    auto [x_real, y_real] = sample_real_batch(ds, B, rng);
    Mat<T> z = sample_latent<T>(rng, B, cfg.latent_dim);
    const Mat<T> x_fake = generator_forward(gen, z, std::span<const int>(y_real));

    // One critic pass over [real; fake] (fakes carry the real batch's
    // labels); the gradient sums are identical to two separate passes.
    std::vector<int> y_cat(y_real);
    y_cat.insert(y_cat.end(), y_real.begin(), y_real.end());
    std::vector<T> scores;
    CriticCache<T> cache = critic_forward_cached(critic, vstack(x_real, x_fake),
                                                 std::span<const int>(y_cat), &scores);
    const std::span<const T> real_scores(scores.data(), static_cast<std::size_t>(B));
    const std::span<const T> fake_scores(scores.data() + B, static_cast<std::size_t>(B));

    const double minimized = critic_loss(real_scores, fake_scores);
    if (!std::isfinite(minimized))
      throw DivergenceError("non-finite critic loss at iteration " + std::to_string(iteration));
    losses.d_loss = -minimized;

    // d(minimized)/d(real_i) = -1/B, d/d(fake_i) = +1/B
    std::vector<T> d_scores(static_cast<std::size_t>(2 * B), inv_b);
    std::fill(d_scores.begin(), d_scores.begin() + B, -inv_b);
    critic_backward(critic, cache, std::span<const T>(d_scores));

    for (Parameter<T>* p : critic_params)
      rmsprop_step(*p, static_cast<T>(cfg.lr), static_cast<T>(cfg.rho), static_cast<T>(cfg.eps));
    clip_parameters(std::span<Parameter<T>* const>(critic_params), static_cast<T>(cfg.clip_c));
    if (hooks && hooks->after_critic_update) hooks->after_critic_update(critic, iteration, step);
  }

  // Generator update: fresh noise, fresh uniform labels, frozen critic.
  Mat<T> z = sample_latent<T>(rng, B, cfg.latent_dim);
  std::vector<int> y(static_cast<std::size_t>(B));
  for (int& label : y) label = rng.label();

  GenCache<T> gen_cache = generator_forward_cached(gen, z, std::span<const int>(y));
  std::vector<T> scores;
  CriticCache<T> critic_cache =
      critic_forward_cached(critic, gen_cache.y, std::span<const int>(y), &scores);

  losses.g_loss = generator_loss(std::span<const T>(scores));
  if (!std::isfinite(losses.g_loss))
    throw DivergenceError("non-finite generator loss at iteration " + std::to_string(iteration));

  std::vector<T> d_scores(static_cast<std::size_t>(B), -inv_b);  // d(-mean)/ds_i
  const Mat<T> d_fake =
      critic_backward(critic, critic_cache, std::span<const T>(d_scores), false);
  generator_backward(gen, gen_cache, d_fake);
  for (Parameter<T>* p : gen_params)
    rmsprop_step(*p, static_cast<T>(cfg.lr), static_cast<T>(cfg.rho), static_cast<T>(cfg.eps));

  return losses;
}

template <class T>
struct TrainResult {
  GeneratorNet<T> gen;
  CriticNet<T> critic;
  TrainingLog log;
};

// Full routine: initializes both networks from cfg.seed and runs cfg.epochs
// epochs of ceil(N / batch) iterations each. A log record is appended every
// log_every epochs and at the final epoch (every epoch with log_each_epoch).
template <class T>
TrainResult<T> train(const Dataset& ds, const TrainConfig& cfg,
                     const TrainHooks<T>* hooks = nullptr) {
  cfg.validate();
  if (ds.size() < 1) throw EmptyDatasetError("train: empty dataset");
  if (!ds.has_label(0) || !ds.has_label(1))
    throw ConfigError("train: dataset must contain both labels");

  Rng rng(cfg.seed);
  TrainResult<T> r;
  r.gen = GeneratorNet<T>(cfg.latent_dim, ds.seg_len);
  r.critic = CriticNet<T>(ds.seg_len);
  init_generator(r.gen, rng);
  init_critic(r.critic, rng);

  const long iters_per_epoch = (ds.size() + cfg.batch - 1) / cfg.batch;
  long iteration = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    IterationLosses losses;
    for (long i = 0; i < iters_per_epoch; ++i)
      losses = train_iteration(r.gen, r.critic, ds, cfg, rng, hooks, iteration++);
    if (cfg.log_each_epoch || epoch % cfg.log_every == 0 || epoch == cfg.epochs)
      r.log.append(epoch, losses.d_loss, losses.g_loss);
  }
  return r;
}

using TrainResultF = TrainResult<float>;

}  // namespace cwgan
