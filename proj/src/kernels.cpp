#include "adex/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace adex::kernels {
namespace {

constexpr std::size_t kColumnBlock = 32;

// Columns [c0, c1) of y += x w. Row-outer order keeps the inner loop a
// contiguous axpy that vectorizes without reassociating any sum.
inline void xw_block(const double* w, std::size_t rows, std::size_t cols, const double* x, double* y,
                     std::size_t c0, std::size_t c1) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    const double* row = w + i * cols;
    for (std::size_t j = c0; j < c1; ++j) y[j] += xi * row[j];
  }
}

// Four interleaved partial sums, combined in a fixed order.
inline double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    s0 += a[j] * b[j];
    s1 += a[j + 1] * b[j + 1];
    s2 += a[j + 2] * b[j + 2];
    s3 += a[j + 3] * b[j + 3];
  }
  for (; j < n; ++j) s0 += a[j] * b[j];
  return (s0 + s1) + (s2 + s3);
}

inline void outer_row(double* g, std::size_t cols, double xi, const double* v) {
  for (std::size_t j = 0; j < cols; ++j) g[j] += xi * v[j];
}

// Register tile of MR rows by NR columns of c. The accumulators start from c
// and take the k products in order, one multiply and one add each.
template <std::size_t MR, std::size_t NR>
inline void gemm_tile(const double* a, const double* b, double* c, std::size_t k, std::size_t n) {
  double acc[MR][NR];
  for (std::size_t r = 0; r < MR; ++r) {
    for (std::size_t j = 0; j < NR; ++j) acc[r][j] = c[r * n + j];
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * n;
    for (std::size_t r = 0; r < MR; ++r) {
      const double ar = a[r * k + p];
      for (std::size_t j = 0; j < NR; ++j) acc[r][j] += ar * bp[j];
    }
  }
  for (std::size_t r = 0; r < MR; ++r) {
    for (std::size_t j = 0; j < NR; ++j) c[r * n + j] = acc[r][j];
  }
}

// Same arithmetic on explicit 8-wide vectors; the compiler lowers them to
// whatever width the target has.
typedef double v8d __attribute__((vector_size(64), aligned(8)));

template <std::size_t MR, std::size_t NV>
inline void gemm_tile_vec(const double* a, const double* b, double* c, std::size_t k, std::size_t n) {
  v8d acc[MR][NV];
  for (std::size_t r = 0; r < MR; ++r) {
    for (std::size_t v = 0; v < NV; ++v) acc[r][v] = *reinterpret_cast<const v8d*>(c + r * n + 8 * v);
  }
  for (std::size_t p = 0; p < k; ++p) {
    const double* bp = b + p * n;
    v8d bv[NV];
    for (std::size_t v = 0; v < NV; ++v) bv[v] = *reinterpret_cast<const v8d*>(bp + 8 * v);
    for (std::size_t r = 0; r < MR; ++r) {
      const double ar = a[r * k + p];
      for (std::size_t v = 0; v < NV; ++v) acc[r][v] += ar * bv[v];
    }
  }
  for (std::size_t r = 0; r < MR; ++r) {
    for (std::size_t v = 0; v < NV; ++v) *reinterpret_cast<v8d*>(c + r * n + 8 * v) = acc[r][v];
  }
}

template <std::size_t MR>
inline void gemm_row_block(const double* a, const double* b, double* c, std::size_t k, std::size_t n,
                           std::size_t c0, std::size_t c1) {
  std::size_t j = c0;
  for (; j + 24 <= c1; j += 24) gemm_tile_vec<MR, 3>(a, b + j, c + j, k, n);
  for (; j + 8 <= c1; j += 8) gemm_tile_vec<MR, 1>(a, b + j, c + j, k, n);
  for (; j + 4 <= c1; j += 4) gemm_tile<MR, 4>(a, b + j, c + j, k, n);
  for (; j < c1; ++j) gemm_tile<MR, 1>(a, b + j, c + j, k, n);
}

// Columns [c0, c1) of c += a b, all rows.
inline void gemm_columns(const double* a, const double* b, double* c, std::size_t m, std::size_t k, std::size_t n,
                         std::size_t c0, std::size_t c1) {
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) gemm_row_block<4>(a + i * k, b, c + i * n, k, n, c0, c1);
  for (; i < m; ++i) gemm_row_block<1>(a + i * k, b, c + i * n, k, n, c0, c1);
}

}  // namespace

namespace serial {

void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y) {
  xw_block(w.data(), rows, cols, x.data(), y.data(), 0, cols);
}

void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] += dot(w.data() + i * cols, v.data(), cols);
}

void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v) {
  for (std::size_t i = 0; i < rows; ++i) {
    if (x[i] == 0.0) continue;
    outer_row(g.data() + i * cols, cols, x[i], v.data());
  }
}

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n) {
  gemm_columns(a.data(), b.data(), c.data(), m, k, n, 0, n);
}

}  // namespace serial

namespace parallel {

void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y) {
  const auto blocks = static_cast<long>((cols + kColumnBlock - 1) / kColumnBlock);
  const double* wp = w.data();
  const double* xp = x.data();
  double* yp = y.data();
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const std::size_t c0 = static_cast<std::size_t>(b) * kColumnBlock;
    xw_block(wp, rows, cols, xp, yp, c0, std::min(cols, c0 + kColumnBlock));
  }
}

void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out) {
  const double* wp = w.data();
  const double* vp = v.data();
  double* op = out.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(rows); ++i) {
    op[i] += dot(wp + static_cast<std::size_t>(i) * cols, vp, cols);
  }
}

void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v) {
  double* gp = g.data();
  const double* xp = x.data();
  const double* vp = v.data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(rows); ++i) {
    if (xp[i] == 0.0) continue;
    outer_row(gp + static_cast<std::size_t>(i) * cols, cols, xp[i], vp);
  }
}

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n) {
  const auto blocks = static_cast<long>((n + kColumnBlock - 1) / kColumnBlock);
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
#pragma omp parallel for schedule(static)
  for (long blk = 0; blk < blocks; ++blk) {
    const std::size_t c0 = static_cast<std::size_t>(blk) * kColumnBlock;
    gemm_columns(ap, bp, cp, m, k, n, c0, std::min(n, c0 + kColumnBlock));
  }
}

}  // namespace parallel

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {
inline bool go_parallel(std::size_t rows, std::size_t cols) {
  return rows * cols >= kParallelThreshold && max_threads() > 1;
}
}  // namespace

void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y) {
  if (go_parallel(rows, cols)) {
    parallel::accumulate_xw(w, rows, cols, x, y);
  } else {
    serial::accumulate_xw(w, rows, cols, x, y);
  }
}

void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out) {
  if (go_parallel(rows, cols)) {
    parallel::accumulate_wv(w, rows, cols, v, out);
  } else {
    serial::accumulate_wv(w, rows, cols, v, out);
  }
}

void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v) {
  if (go_parallel(rows, cols)) {
    parallel::accumulate_outer(g, rows, cols, x, v);
  } else {
    serial::accumulate_outer(g, rows, cols, x, v);
  }
}

void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n) {
  if (m * n * k >= 8 * kParallelThreshold && max_threads() > 1) {
    parallel::gemm(a, b, c, m, k, n);
  } else {
    serial::gemm(a, b, c, m, k, n);
  }
}

void transpose(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<double> out) {
  constexpr std::size_t kTile = 16;
  for (std::size_t i0 = 0; i0 < rows; i0 += kTile) {
    for (std::size_t j0 = 0; j0 < cols; j0 += kTile) {
      const std::size_t i1 = std::min(rows, i0 + kTile);
      const std::size_t j1 = std::min(cols, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) out[j * rows + i] = a[i * cols + j];
      }
    }
  }
}

}  // namespace adex::kernels
