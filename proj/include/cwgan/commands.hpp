#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "cwgan/config.hpp"
#include "cwgan/data.hpp"
#include "cwgan/eval.hpp"
#include "cwgan/model_io.hpp"
#include "cwgan/svg.hpp"
#include "cwgan/train.hpp"

namespace cwgan {

inline constexpr const char* kModelFileName = "model.cwg";
inline constexpr const char* kLogFileName = "training_log.csv";
inline constexpr const char* kPlotFileName = "loss_curves.svg";

namespace detail {

// Maps module errors to an exit status: 2 for misuse, 1 for everything else.
template <class Fn>
int run_command(Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace detail

// Train per the JSON config; writes model, loss-log CSV, and an SVG loss plot
// into out_dir.
inline int cmd_train(const std::string& config_path) {
  return detail::run_command([&] {
    const RunConfig cfg = load_run_config(config_path);
    if (cfg.data_dir.empty()) throw ConfigError("config must set data_dir");
    const Dataset ds = load_dataset_dir(cfg.data_dir, cfg.seg_len);
    TrainResultF result = train<float>(ds, cfg.train);

    namespace fs = std::filesystem;
    const fs::path out(cfg.out_dir);
    fs::create_directories(out);
    save_model(result.gen, result.critic, out / kModelFileName);
    export_training_log(result.log, out / kLogFileName);
    write_loss_plot(result.log, out / kPlotFileName);

    const LogRecord& last = result.log.records.back();
    std::printf("trained %d epochs on %d segments (seg_len %d)\n", cfg.train.epochs, ds.size(),
                ds.seg_len);
    std::printf("final losses: d_loss=%.6f g_loss=%.6f\n", last.d_loss, last.g_loss);
    std::printf("artifacts in %s: %s, %s, %s\n", cfg.out_dir.c_str(), kModelFileName,
                kLogFileName, kPlotFileName);
  });
}

// Synthesizes `count` segments for one label and writes them as
// <label>_synthetic.csv in the data module's format. The batch is min-max
// scaled file-wise before writing so a reload sees a file that already spans
// [-1, 1] and the augmentation loop stays lossless.
inline int cmd_generate(const std::string& model_path, int label, int count, std::uint64_t seed,
                        const std::string& out_dir) {
  return detail::run_command([&] {
    if (label != 0 && label != 1) throw UsageError("label must be 0 or 1");
    if (count < 1) throw UsageError("count must be >= 1");
    auto [gen, critic] = load_model(model_path);
    (void)critic;
    const MatF synth = generate_synthetic(gen, {label, count, seed});
    const MatF scaled = minmax_scale_file(synth);

    namespace fs = std::filesystem;
    const fs::path out(out_dir);
    fs::create_directories(out);
    const fs::path file = out / (std::to_string(label) + "_synthetic.csv");
    write_csv(file, scaled);
    std::printf("wrote %d segments to %s\n", count, file.string().c_str());
  });
}

// Synthesizes a batch matched to the real samples of one label and writes
// fidelity report files (text table + per-dimension CSV).
inline int cmd_evaluate(const std::string& model_path, const std::string& data_dir, int label,
                        const std::string& out_dir, std::uint64_t seed = 0) {
  return detail::run_command([&] {
    if (label != 0 && label != 1) throw UsageError("label must be 0 or 1");
    auto [gen, critic] = load_model(model_path);
    (void)critic;
    const Dataset ds = load_dataset_dir(data_dir, gen.seg_len);

    int n_label = 0;
    for (int l : ds.labels) n_label += (l == label);
    if (n_label == 0)
      throw ConfigError("label " + std::to_string(label) + " absent from " + data_dir);
    MatF real(n_label, ds.seg_len);
    for (int r = 0, i = 0; r < ds.size(); ++r)
      if (ds.labels[r] == label) {
        std::copy(ds.samples.row(r), ds.samples.row(r) + ds.seg_len, real.row(i));
        ++i;
      }

    const MatF synth = generate_synthetic(gen, {label, n_label, seed});
    const FidelityReport rep = make_fidelity_report(real, synth);

    namespace fs = std::filesystem;
    const fs::path out(out_dir);
    fs::create_directories(out);
    atomic_write_file(out / "fidelity_report.txt", fidelity_text(rep));
    atomic_write_file(out / "fidelity_report.csv", fidelity_csv(rep));
    std::printf("evaluated %d real vs %d synthetic label-%d segments\n", rep.n_real, rep.n_synth,
                label);
    std::printf("spectrum L2 distance: %.6f\n", rep.spectrum_l2);
  });
}

// Writes 0_toy.csv and 1_toy.csv, loadable by the dataset loader.
inline int cmd_make_toy(int n_per_class, int seg_len, double f0, double f1, double noise_std,
                        std::uint64_t seed, const std::string& out_dir) {
  return detail::run_command([&] {
    validate_toy_params(n_per_class, seg_len, f0, f1, noise_std);
    Rng rng(seed);
    const MatF c0 = make_toy_class(n_per_class, seg_len, f0, noise_std, rng);
    const MatF c1 = make_toy_class(n_per_class, seg_len, f1, noise_std, rng);

    namespace fs = std::filesystem;
    const fs::path out(out_dir);
    fs::create_directories(out);
    write_csv(out / "0_toy.csv", c0);
    write_csv(out / "1_toy.csv", c1);
    std::printf("wrote %d segments per class to %s\n", n_per_class, out_dir.c_str());
  });
}

}  // namespace cwgan
