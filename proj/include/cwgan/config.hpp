#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "cwgan/train.hpp"

namespace cwgan {

// Run configuration for the CLI. Every key is optional except data_dir;
// missing keys take the published defaults, unknown keys are rejected.
struct RunConfig {
  TrainConfig train;
  std::string data_dir;
  std::string out_dir = "out";
  int seg_len = kDefaultSegLen;
};

inline RunConfig parse_run_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  static const std::set<std::string> known = {
      "latent_dim", "n_critic", "batch",   "lr",        "rho",
      "eps",        "clip_c",   "epochs",  "log_every", "log_each_epoch",
      "seed",       "data_dir", "out_dir", "seg_len"};
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw ConfigError("unknown config key: " + key);

  RunConfig cfg;
  try {
    TrainConfig& t = cfg.train;
    t.latent_dim = j.value("latent_dim", t.latent_dim);
    t.n_critic = j.value("n_critic", t.n_critic);
    t.batch = j.value("batch", t.batch);
    t.lr = j.value("lr", t.lr);
    t.rho = j.value("rho", t.rho);
    t.eps = j.value("eps", t.eps);
    t.clip_c = j.value("clip_c", t.clip_c);
    t.epochs = j.value("epochs", t.epochs);
    t.log_every = j.value("log_every", t.log_every);
    t.log_each_epoch = j.value("log_each_epoch", t.log_each_epoch);
    t.seed = j.value("seed", t.seed);
    cfg.data_dir = j.value("data_dir", cfg.data_dir);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.seg_len = j.value("seg_len", cfg.seg_len);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  cfg.train.validate();
  if (cfg.seg_len < 2) throw ConfigError("seg_len must be >= 2");
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return parse_run_config(j);
}

}  // namespace cwgan
