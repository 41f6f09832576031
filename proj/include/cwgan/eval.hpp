#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cwgan/data.hpp"
#include "cwgan/networks.hpp"
#include "cwgan/train.hpp"

namespace cwgan {

// ============================================================================
// Synthesis
// ============================================================================

struct SynthesisRequest {
  int label = 1;
  int count = 1;
  std::uint64_t seed = 0;
};

// Pure function of (generator parameters, request): fresh noise conditioned
// on one label. Rows land in [-1, 1] via the tanh output.
template <class T>
Mat<T> generate_synthetic(const GeneratorNet<T>& gen, const SynthesisRequest& req) {
  require_label(req.label);
  if (req.count < 1) throw ConfigError("generate_synthetic: count must be >= 1");
  Rng rng(req.seed);
  Mat<T> z = sample_latent<T>(rng, req.count, gen.latent_dim);
  std::vector<int> labels(static_cast<std::size_t>(req.count), req.label);
  return generator_forward(gen, z, std::span<const int>(labels));
}

// ============================================================================
// Fidelity metrics. All statistics accumulate in double.
// ============================================================================

struct MomentDiff {
  std::vector<double> mean_diff;  // |mean_real - mean_synth| per dimension
  std::vector<double> std_diff;   // |std_real - std_synth| per dimension
};

namespace detail {

inline void column_moments(const MatF& m, std::vector<double>& mean, std::vector<double>& stdev) {
  const int n = m.rows, d = m.cols;
  mean.assign(d, 0.0);
  stdev.assign(d, 0.0);
  for (int r = 0; r < n; ++r) {
    const float* row = m.row(r);
    for (int c = 0; c < d; ++c) mean[c] += row[c];
  }
  for (int c = 0; c < d; ++c) mean[c] /= n;
  for (int r = 0; r < n; ++r) {
    const float* row = m.row(r);
    for (int c = 0; c < d; ++c) {
      const double dev = row[c] - mean[c];
      stdev[c] += dev * dev;
    }
  }
  for (int c = 0; c < d; ++c) stdev[c] = std::sqrt(stdev[c] / n);
}

}  // namespace detail

inline MomentDiff moment_compare(const MatF& real, const MatF& synth) {
  if (real.cols != synth.cols)
    throw ShapeError("moment_compare: " + real.shape_str() + " vs " + synth.shape_str());
  if (real.rows < 1 || synth.rows < 1) throw ShapeError("moment_compare: empty input");
  std::vector<double> mr, sr, ms, ss;
  detail::column_moments(real, mr, sr);
  detail::column_moments(synth, ms, ss);
  MomentDiff out;
  out.mean_diff.resize(real.cols);
  out.std_diff.resize(real.cols);
  for (int c = 0; c < real.cols; ++c) {
    out.mean_diff[c] = std::abs(mr[c] - ms[c]);
    out.std_diff[c] = std::abs(sr[c] - ss[c]);
  }
  return out;
}

// Mean squared DFT magnitude per one-sided bin k = 0 .. floor(L/2), averaged
// over samples. Plays the role of a power spectral density for length-L
// segments; averaging across segments substitutes for windowing.
inline std::vector<double> mean_magnitude_spectrum(const MatF& samples) {
  if (samples.rows < 1 || samples.cols < 1)
    throw ShapeError("mean_magnitude_spectrum: empty input");
  const int n = samples.rows, len = samples.cols;
  const int bins = len / 2 + 1;
  constexpr double two_pi = 6.283185307179586476925286766559;

  std::vector<double> cos_tab(static_cast<std::size_t>(bins) * len);
  std::vector<double> sin_tab(static_cast<std::size_t>(bins) * len);
  for (int k = 0; k < bins; ++k)
    for (int t = 0; t < len; ++t) {
      const double a = two_pi * k * t / len;
      cos_tab[static_cast<std::size_t>(k) * len + t] = std::cos(a);
      sin_tab[static_cast<std::size_t>(k) * len + t] = std::sin(a);
    }

  std::vector<double> spectrum(bins, 0.0);
  for (int r = 0; r < n; ++r) {
    const float* x = samples.row(r);
    for (int k = 0; k < bins; ++k) {
      const double* ct = &cos_tab[static_cast<std::size_t>(k) * len];
      const double* st = &sin_tab[static_cast<std::size_t>(k) * len];
      double re = 0.0, im = 0.0;
      for (int t = 0; t < len; ++t) {
        re += x[t] * ct[t];
        im -= x[t] * st[t];
      }
      spectrum[k] += re * re + im * im;
    }
  }
  for (double& v : spectrum) v /= n;
  return spectrum;
}

inline int spectral_argmax(const std::vector<double>& spectrum) {
  return static_cast<int>(std::max_element(spectrum.begin(), spectrum.end()) - spectrum.begin());
}

// Classical two-sample Kolmogorov-Smirnov statistic per column.
inline std::vector<double> ks_per_dimension(const MatF& real, const MatF& synth) {
  if (real.cols != synth.cols)
    throw ShapeError("ks_per_dimension: " + real.shape_str() + " vs " + synth.shape_str());
  if (real.rows < 2 || synth.rows < 2)
    throw ConfigError("ks_per_dimension: need at least 2 rows per side");
  const int n = real.rows, m = synth.rows, d = real.cols;
  std::vector<double> out(d, 0.0);
  std::vector<float> a(n), b(m);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < n; ++r) a[r] = real(r, c);
    for (int r = 0; r < m; ++r) b[r] = synth(r, c);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    int i = 0, j = 0;
    double dmax = 0.0;
    while (i < n && j < m) {
      const float x = std::min(a[i], b[j]);
      while (i < n && a[i] == x) ++i;
      while (j < m && b[j] == x) ++j;
      dmax = std::max(dmax, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    out[c] = dmax;
  }
  return out;
}

struct FidelityReport {
  int n_real = 0;
  int n_synth = 0;
  MomentDiff moments;
  std::vector<double> ks;
  std::vector<double> spectrum_real;
  std::vector<double> spectrum_synth;
  double spectrum_l2 = 0.0;
};

inline FidelityReport make_fidelity_report(const MatF& real, const MatF& synth) {
  FidelityReport rep;
  rep.n_real = real.rows;
  rep.n_synth = synth.rows;
  rep.moments = moment_compare(real, synth);
  rep.ks = ks_per_dimension(real, synth);
  rep.spectrum_real = mean_magnitude_spectrum(real);
  rep.spectrum_synth = mean_magnitude_spectrum(synth);
  double acc = 0.0;
  for (std::size_t k = 0; k < rep.spectrum_real.size(); ++k) {
    const double diff = rep.spectrum_real[k] - rep.spectrum_synth[k];
    acc += diff * diff;
  }
  rep.spectrum_l2 = std::sqrt(acc);
  return rep;
}

// ============================================================================
// Export
// ============================================================================

inline void append_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

// CSV with header epoch,d_loss,g_loss; reals in shortest round-trip form.
inline std::string training_log_csv(const TrainingLog& log) {
  if (log.records.empty()) throw StateError("export_training_log: empty log");
  std::string out = "epoch,d_loss,g_loss\n";
  for (const LogRecord& r : log.records) {
    out += std::to_string(r.epoch);
    out.push_back(',');
    append_double(out, r.d_loss);
    out.push_back(',');
    append_double(out, r.g_loss);
    out.push_back('\n');
  }
  return out;
}

inline void export_training_log(const TrainingLog& log, const std::filesystem::path& path) {
  atomic_write_file(path, training_log_csv(log));
}

// Machine-readable per-dimension report: dim, mean_diff, std_diff, ks.
inline std::string fidelity_csv(const FidelityReport& rep) {
  std::string out = "dim,mean_diff,std_diff,ks\n";
  for (std::size_t c = 0; c < rep.ks.size(); ++c) {
    out += std::to_string(c);
    out.push_back(',');
    append_double(out, rep.moments.mean_diff[c]);
    out.push_back(',');
    append_double(out, rep.moments.std_diff[c]);
    out.push_back(',');
    append_double(out, rep.ks[c]);
    out.push_back('\n');
  }
  return out;
}

inline std::string fidelity_text(const FidelityReport& rep) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "fidelity report: %d real vs %d synthetic segments\n\n",
                rep.n_real, rep.n_synth);
  out += line;
  out += "  dim   mean_diff    std_diff          ks\n";
  for (std::size_t c = 0; c < rep.ks.size(); ++c) {
    std::snprintf(line, sizeof(line), "%5zu %11.6f %11.6f %11.6f\n", c,
                  rep.moments.mean_diff[c], rep.moments.std_diff[c], rep.ks[c]);
    out += line;
  }
  out += "\n  bin    real power   synth power\n";
  for (std::size_t k = 0; k < rep.spectrum_real.size(); ++k) {
    std::snprintf(line, sizeof(line), "%5zu %13.6f %13.6f\n", k, rep.spectrum_real[k],
                  rep.spectrum_synth[k]);
    out += line;
  }
  std::snprintf(line, sizeof(line), "\nspectrum L2 distance: %.6f\n", rep.spectrum_l2);
  out += line;
  std::snprintf(line, sizeof(line), "spectral argmax: real bin %d, synth bin %d\n",
                spectral_argmax(rep.spectrum_real), spectral_argmax(rep.spectrum_synth));
  out += line;
  return out;
}

}  // namespace cwgan
