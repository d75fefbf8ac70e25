#pragma once

#include <cstddef>
#include <span>

// Dense linear-algebra kernels used by every layer. Matrices are row-major
// [rows, cols]. The parallel versions split work over independent output
// entries and keep each entry's summation order identical to the serial
// reference, so both paths produce bit-identical results for any thread count.
namespace adex::kernels {

/// y[j] += sum_i x[i] * w[i, j]
void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y);

/// out[i] += sum_j w[i, j] * v[j]
void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out);

/// g[i, j] += x[i] * v[j]
void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v);

/// c[m, n] += a[m, k] b[k, n]. Every entry adds its k products in
/// ascending order, so row i equals accumulate_xw applied to row i of a.
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n);

/// out[cols, rows] = a[rows, cols] transposed.
void transpose(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<double> out);

/// Work size (rows * cols) below which the parallel entry points stay serial.
inline constexpr std::size_t kParallelThreshold = 1 << 15;

bool openmp_enabled();
int max_threads();

namespace serial {

void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y);
void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out);
void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v);
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n);

}  // namespace serial

namespace parallel {

// Always go through OpenMP regardless of size; used by tests and the benchmark.
void accumulate_xw(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y);
void accumulate_wv(std::span<const double> w, std::size_t rows, std::size_t cols,
                   std::span<const double> v, std::span<double> out);
void accumulate_outer(std::span<double> g, std::size_t rows, std::size_t cols,
                      std::span<const double> x, std::span<const double> v);
void gemm(std::span<const double> a, std::span<const double> b, std::span<double> c, std::size_t m,
          std::size_t k, std::size_t n);

}  // namespace parallel

}  // namespace adex::kernels
