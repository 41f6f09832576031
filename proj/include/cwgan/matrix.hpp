#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cwgan/error.hpp"
#include "cwgan/threads.hpp"

namespace cwgan {

// Dense row-major matrix. T is float in production; the gradient-check suite
// instantiates double for its 64-bit accumulation mode.
template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  Mat() = default;
  Mat(int r, int c) {
    if (r < 0 || c < 0) throw ShapeError("matrix dims must be non-negative");
    rows = r;
    cols = c;
    data.assign(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), T{0});
  }

  T& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const T& operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

  T* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }

  std::size_t size() const { return data.size(); }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }

  void fill(T v) { std::fill(data.begin(), data.end(), v); }

  std::string shape_str() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

  bool all_finite() const {
    for (const T& v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

using MatF = Mat<float>;

namespace detail {

template <class T>
inline void require_same_shape(const Mat<T>& a, const Mat<T>& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
}

}  // namespace detail

// Tiled through a local buffer: both the source reads and the destination
// writes stay sequential within a tile, which sidesteps the 4 KB-stride
// cache aliasing a direct row-by-row transpose runs into.
template <class T>
Mat<T> transpose(const Mat<T>& a) {
  constexpr int BT = 64;
  Mat<T> t(a.cols, a.rows);
  T buf[BT * BT];
  for (int i0 = 0; i0 < a.rows; i0 += BT) {
    const int ib = std::min(BT, a.rows - i0);
    for (int j0 = 0; j0 < a.cols; j0 += BT) {
      const int jb = std::min(BT, a.cols - j0);
      for (int i = 0; i < ib; ++i) {
        const T* __restrict__ src = a.row(i0 + i) + j0;
        for (int j = 0; j < jb; ++j) buf[j * BT + i] = src[j];
      }
      for (int j = 0; j < jb; ++j) {
        T* __restrict__ dst = t.row(j0 + j) + i0;
        for (int i = 0; i < ib; ++i) dst[i] = buf[j * BT + i];
      }
    }
  }
  return t;
}

namespace detail {

// Register-tiled micro-kernels over one k chunk [p0, p1): the accumulators
// live in registers for the whole chunk and are added to C once. IR rows of
// A share each B row, so the wide tile also cuts B traffic.
template <int IR, class T>
void matmul_tile(const Mat<T>& a, const Mat<T>& b, Mat<T>& c, int i0, int j0, int p0, int p1) {
  constexpr int JT = 32;
  const T* __restrict__ ar[IR];
  for (int r = 0; r < IR; ++r) ar[r] = a.row(i0 + r);
  T acc[IR][JT] = {};
  for (int p = p0; p < p1; ++p) {
    const T* __restrict__ bp = b.row(p) + j0;
    for (int r = 0; r < IR; ++r) {
      const T v = ar[r][p];
      for (int j = 0; j < JT; ++j) acc[r][j] += v * bp[j];
    }
  }
  for (int r = 0; r < IR; ++r) {
    T* __restrict__ cr = c.row(i0 + r) + j0;
    for (int j = 0; j < JT; ++j) cr[j] += acc[r][j];
  }
}

// One row, up to 32 columns; handles every remainder.
template <class T>
void matmul_tile_1(const Mat<T>& a, const Mat<T>& b, Mat<T>& c, int i, int j0, int jb, int p0,
                   int p1) {
  const T* __restrict__ ai = a.row(i);
  T acc[32] = {};
  for (int p = p0; p < p1; ++p) {
    const T* __restrict__ bp = b.row(p) + j0;
    const T av = ai[p];
    for (int j = 0; j < jb; ++j) acc[j] += av * bp[j];
  }
  T* __restrict__ ci = c.row(i) + j0;
  for (int j = 0; j < jb; ++j) ci[j] += acc[j];
}

}  // namespace detail

// C = A * B. Column tiles are independent and every C entry accumulates in a
// fixed k-chunk order by exactly one thread, so results do not depend on the
// thread count or on which row-block size covered an entry. Large k is
// chunked so the B slice a tile works on stays cache-resident across row
// blocks; the chunk size is a pure function of k, keeping the summation tree
// fixed for a given shape.
template <class T>
Mat<T> matmul(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols != b.rows)
    throw ShapeError("matmul: inner dims disagree, " + a.shape_str() + " * " + b.shape_str());
  Mat<T> c(a.rows, b.cols);
  const int m = a.rows, n = b.cols, k = a.cols;
  constexpr int JT = 32;
  const int kc = k > 256 ? 128 : k;
  const int n_tiles = (n + JT - 1) / JT;
#if defined(_OPENMP)
  const int nt = max_threads();
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1 && n_tiles >= nt)
#endif
  for (int tile = 0; tile < n_tiles; ++tile) {
    const int j0 = tile * JT;
    const int jb = std::min(JT, n - j0);
    for (int p0 = 0; p0 < k; p0 += kc) {
      const int p1 = std::min(p0 + kc, k);
      int i0 = 0;
      if (jb == JT) {
        for (; i0 + 8 <= m; i0 += 8) detail::matmul_tile<8>(a, b, c, i0, j0, p0, p1);
        for (; i0 + 4 <= m; i0 += 4) detail::matmul_tile<4>(a, b, c, i0, j0, p0, p1);
      }
      for (; i0 < m; ++i0) detail::matmul_tile_1(a, b, c, i0, j0, jb, p0, p1);
    }
  }
  return c;
}

// C = A^T * B (A: m x k read column-wise), used for weight gradients. The
// transposed copy is cheap here: A is an activation batch, k rows only.
template <class T>
Mat<T> matmul_tn(const Mat<T>& a, const Mat<T>& b) {
  return matmul(transpose(a), b);
}

// C = A * B^T, used to push gradients back through a dense layer.
template <class T>
Mat<T> matmul_nt(const Mat<T>& a, const Mat<T>& b) {
  return matmul(a, transpose(b));
}

template <class T>
Mat<T> hadamard(const Mat<T>& a, const Mat<T>& b) {
  detail::require_same_shape(a, b, "hadamard");
  Mat<T> c(a.rows, a.cols);
  for (std::size_t i = 0; i < a.size(); ++i) c.data[i] = a.data[i] * b.data[i];
  return c;
}

// Adds a 1 x n row vector to every row of a.
template <class T>
void add_row_inplace(Mat<T>& a, const Mat<T>& row_vec) {
  if (row_vec.rows != 1 || row_vec.cols != a.cols)
    throw ShapeError("add_row: want 1x" + std::to_string(a.cols) + ", got " + row_vec.shape_str());
  const T* rv = row_vec.row(0);
  for (int i = 0; i < a.rows; ++i) {
    T* ai = a.row(i);
    for (int j = 0; j < a.cols; ++j) ai[j] += rv[j];
  }
}

// 1 x n column sums, used for bias gradients.
template <class T>
Mat<T> col_sum(const Mat<T>& a) {
  Mat<T> s(1, a.cols);
  T* sp = s.row(0);
  for (int i = 0; i < a.rows; ++i) {
    const T* ai = a.row(i);
    for (int j = 0; j < a.cols; ++j) sp[j] += ai[j];
  }
  return s;
}

// Rows of a stacked over rows of b.
template <class T>
Mat<T> vstack(const Mat<T>& a, const Mat<T>& b) {
  if (a.cols != b.cols)
    throw ShapeError("vstack: column mismatch, " + a.shape_str() + " vs " + b.shape_str());
  Mat<T> c(a.rows + b.rows, a.cols);
  std::copy(a.data.begin(), a.data.end(), c.data.begin());
  std::copy(b.data.begin(), b.data.end(), c.data.begin() + a.size());
  return c;
}

template <class T>
T max_abs(const Mat<T>& a) {
  T m = T{0};
  for (const T& v : a.data) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cwgan
