#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cwgan/matrix.hpp"
#include "cwgan/rng.hpp"

namespace cwgan {

inline constexpr int kDefaultSegLen = 32;

// N scaled segments with their class labels. Immutable once assembled.
struct Dataset {
  MatF samples;             // N x seg_len, entries in [-1, 1]
  std::vector<int> labels;  // N entries in {0, 1}
  int seg_len = kDefaultSegLen;

  int size() const { return samples.rows; }
  bool has_label(int label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }
};

// ============================================================================
// CSV: comma-separated reals, one segment per row, no header. Reals are
// printed in shortest round-trip form.
// ============================================================================

inline void append_float(std::string& out, float v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline std::string csv_string(const MatF& m) {
  std::string out;
  out.reserve(m.size() * 10);
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      if (c) out.push_back(',');
      append_float(out, m(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

// Whole-file write through a temp file plus rename, so readers never see a
// partial file.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

inline void write_csv(const std::filesystem::path& path, const MatF& m) {
  atomic_write_file(path, csv_string(m));
}

namespace detail {

inline bool blank_line(std::string_view s) {
  return s.find_first_not_of(" \t\r") == std::string_view::npos;
}

inline float parse_cell(std::string_view cell, const std::string& file, int line_no) {
  const std::size_t b = cell.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    throw ParseError(file + ":" + std::to_string(line_no) + ": empty cell");
  const std::size_t e = cell.find_last_not_of(" \t\r");
  cell = cell.substr(b, e - b + 1);
  float v = 0.0f;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw ParseError(file + ":" + std::to_string(line_no) + ": bad number '" +
                     std::string(cell) + "'");
  return v;
}

}  // namespace detail

// Parses a CSV segment file into a matrix. Ragged rows and non-numeric cells
// raise ParseError naming the file and line.
inline MatF read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<float> values;
  int cols = -1, rows = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    std::string_view rest(line);
    int row_cols = 0;
    while (true) {
      const std::size_t comma = rest.find(',');
      const std::string_view cell = rest.substr(0, comma);
      values.push_back(detail::parse_cell(cell, path.string(), line_no));
      ++row_cols;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols < 0) {
      cols = row_cols;
    } else if (row_cols != cols) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": ragged row, got " +
                       std::to_string(row_cols) + " cells, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ParseError(path.string() + ": no data rows");
  MatF m(rows, cols);
  std::copy(values.begin(), values.end(), m.data.begin());
  return m;
}

// ============================================================================
// Scaling and loading
// ============================================================================

// (x - min) / (max - min) * 2 - 1 with min/max over the whole file, so the
// result spans exactly [-1, 1]. Constant files are rejected.
inline MatF minmax_scale_file(const MatF& raw) {
  if (raw.size() == 0) throw ShapeError("minmax_scale_file: empty matrix");
  float lo = raw.data[0], hi = raw.data[0];
  for (float v : raw.data) {
    if (!std::isfinite(v)) throw ParseError("minmax_scale_file: non-finite entry");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) throw DegenerateFileError("constant file: max == min");
  const float range = hi - lo;
  MatF out(raw.rows, raw.cols);
  for (std::size_t i = 0; i < raw.size(); ++i)
    out.data[i] = (raw.data[i] - lo) / range * 2.0f - 1.0f;
  return out;
}

namespace detail {

// Segment files carry their class in the filename: stem "0_..." or "1_...".
inline int label_from_stem(const std::string& stem) {
  if (stem.size() >= 2 && (stem[0] == '0' || stem[0] == '1') && stem[1] == '_')
    return stem[0] - '0';
  return -1;
}

}  // namespace detail

// Loads every "0_*"/"1_*" file in `dir` (lexicographic filename order), scales
// each file-wise, and appends its rows as samples. Constant files are skipped
// with a warning; other files are ignored.
inline Dataset load_dataset_dir(const std::filesystem::path& dir, int seg_len = kDefaultSegLen) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  if (seg_len < 1) throw ConfigError("seg_len must be >= 1");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (detail::label_from_stem(entry.path().stem().string()) >= 0)
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<float> all;
  std::vector<int> labels;
  for (const fs::path& f : files) {
    const int label = detail::label_from_stem(f.stem().string());
    MatF raw = read_csv(f);
    if (raw.cols != seg_len)
      throw ShapeError(f.string() + ": rows have " + std::to_string(raw.cols) +
                       " columns, expected seg_len " + std::to_string(seg_len));
    MatF scaled;
    try {
      scaled = minmax_scale_file(raw);
    } catch (const DegenerateFileError&) {
      std::cerr << "warning: skipping constant file " << f.string() << "\n";
      continue;
    }
    all.insert(all.end(), scaled.data.begin(), scaled.data.end());
    labels.insert(labels.end(), scaled.rows, label);
  }
  if (labels.empty()) throw EmptyDatasetError("no valid segment files in " + dir.string());

  Dataset ds;
  ds.seg_len = seg_len;
  ds.samples = MatF(static_cast<int>(labels.size()), seg_len);
  std::copy(all.begin(), all.end(), ds.samples.data.begin());
  ds.labels = std::move(labels);
  return ds;
}

// Uniform sampling with replacement; batch may exceed the dataset size.
inline std::pair<MatF, std::vector<int>> sample_real_batch(const Dataset& ds, int batch, Rng& rng) {
  if (ds.size() < 1) throw EmptyDatasetError("sample_real_batch: empty dataset");
  if (batch < 1) throw ConfigError("sample_real_batch: batch must be >= 1");
  MatF x(batch, ds.seg_len);
  std::vector<int> y(batch);
  for (int b = 0; b < batch; ++b) {
    const int idx = static_cast<int>(rng.below(static_cast<std::uint64_t>(ds.size())));
    std::copy(ds.samples.row(idx), ds.samples.row(idx) + ds.seg_len, x.row(b));
    y[b] = ds.labels[idx];
  }
  return {std::move(x), std::move(y)};
}

// ============================================================================
// Toy data: class c is a sine at f_c cycles per segment with a random phase
// plus Gaussian noise, scaled per class like one file. A stand-in corpus for
// training and acceptance runs.
// ============================================================================

inline void validate_toy_params(int n_per_class, int seg_len, double f0, double f1,
                                double noise_std) {
  if (n_per_class < 1) throw ConfigError("toy data: n_per_class must be >= 1");
  if (seg_len < 2) throw ConfigError("toy data: seg_len must be >= 2");
  if (!(noise_std >= 0.0)) throw ConfigError("toy data: noise_std must be >= 0");
  const double nyquist = seg_len / 2.0;
  if (!(f0 >= 0.0) || !(f1 >= 0.0) || f0 >= nyquist || f1 >= nyquist)
    throw ConfigError("toy data: frequencies must lie in [0, seg_len/2)");
  if (f0 == f1) throw ConfigError("toy data: f0 and f1 must differ");
}

// One class's segments, already scaled to [-1, 1].
inline MatF make_toy_class(int n, int seg_len, double freq, double noise_std, Rng& rng) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  MatF raw(n, seg_len);
  for (int r = 0; r < n; ++r) {
    const double phase = rng.uniform01() * two_pi;
    for (int t = 0; t < seg_len; ++t) {
      const double v = std::sin(two_pi * freq * t / seg_len + phase) + rng.normal() * noise_std;
      raw(r, t) = static_cast<float>(v);
    }
  }
  return minmax_scale_file(raw);
}

inline Dataset make_toy_dataset(int n_per_class, int seg_len, double f0, double f1,
                                double noise_std, std::uint64_t seed) {
  validate_toy_params(n_per_class, seg_len, f0, f1, noise_std);
  Rng rng(seed);
  const MatF c0 = make_toy_class(n_per_class, seg_len, f0, noise_std, rng);
  const MatF c1 = make_toy_class(n_per_class, seg_len, f1, noise_std, rng);
  Dataset ds;
  ds.seg_len = seg_len;
  ds.samples = MatF(2 * n_per_class, seg_len);
  std::copy(c0.data.begin(), c0.data.end(), ds.samples.data.begin());
  std::copy(c1.data.begin(), c1.data.end(), ds.samples.data.begin() + c0.size());
  ds.labels.assign(static_cast<std::size_t>(n_per_class), 0);
  ds.labels.insert(ds.labels.end(), static_cast<std::size_t>(n_per_class), 1);
  return ds;
}

}  // namespace cwgan
