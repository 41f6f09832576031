// Command-line front end: train / generate / evaluate / make-toy.

#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "cwgan/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conditional Wasserstein GAN (weight clipping) for labeled signal segments"};
  app.require_subcommand(1);

  std::string config_path;
  auto* train = app.add_subcommand("train", "Train from a JSON config");
  train->add_option("--config", config_path, "JSON run config")->required();

  std::string model_path, out_dir, data_dir;
  int label = 1;
  int count = 1;
  std::uint64_t seed = 0;
  auto* generate = app.add_subcommand("generate", "Synthesize segments from a trained model");
  generate->add_option("--model", model_path, "model file")->required();
  generate->add_option("--label", label, "class label, 0 or 1")->required();
  generate->add_option("--count", count, "number of segments")->required();
  generate->add_option("--seed", seed, "noise seed (default 0)");
  generate->add_option("--out", out_dir, "output directory")->required();

  std::string eval_model, eval_data, eval_out;
  int eval_label = 1;
  std::uint64_t eval_seed = 0;
  auto* evaluate = app.add_subcommand("evaluate", "Compare synthetic against real segments");
  evaluate->add_option("--model", eval_model, "model file")->required();
  evaluate->add_option("--data", eval_data, "directory of real segment files")->required();
  evaluate->add_option("--label", eval_label, "class label, 0 or 1")->required();
  evaluate->add_option("--seed", eval_seed, "noise seed (default 0)");
  evaluate->add_option("--out", eval_out, "output directory")->required();

  int toy_n = 500, toy_seg = 32;
  double toy_f0 = 2.0, toy_f1 = 6.0, toy_noise = 0.1;
  std::uint64_t toy_seed = 0;
  std::string toy_out;
  auto* make_toy = app.add_subcommand("make-toy", "Write a labeled toy segment corpus");
  make_toy->add_option("--n-per-class", toy_n, "segments per class (default 500)");
  make_toy->add_option("--seg-len", toy_seg, "segment length (default 32)");
  make_toy->add_option("--f0", toy_f0, "class-0 frequency, cycles/segment (default 2)");
  make_toy->add_option("--f1", toy_f1, "class-1 frequency, cycles/segment (default 6)");
  make_toy->add_option("--noise-std", toy_noise, "Gaussian noise level (default 0.1)");
  make_toy->add_option("--seed", toy_seed, "rng seed (default 0)");
  make_toy->add_option("--out", toy_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return cwgan::cmd_train(config_path);
  if (generate->parsed()) return cwgan::cmd_generate(model_path, label, count, seed, out_dir);
  if (evaluate->parsed())
    return cwgan::cmd_evaluate(eval_model, eval_data, eval_label, eval_out, eval_seed);
  if (make_toy->parsed())
    return cwgan::cmd_make_toy(toy_n, toy_seg, toy_f0, toy_f1, toy_noise, toy_seed, toy_out);
  return 1;
}
