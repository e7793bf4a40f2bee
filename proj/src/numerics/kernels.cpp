// SPDX-License-Identifier: Apache-2.0

#include "visir/numerics/kernels.hpp"

#include <algorithm>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace visir::kernels {

namespace {

inline void row_nn(MatrixView a, MatrixView b, double* c, std::size_t i) {
  const std::size_t k = a.cols;
  const std::size_t n = b.cols;
  double* crow = c + i * n;
  const double* arow = a.data + i * k;
  for (std::size_t p = 0; p < k; ++p) {
    const double aip = arow[p];
    const double* brow = b.data + p * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
  }
}

inline void row_nt(MatrixView a, MatrixView b, double* c, std::size_t i) {
  const std::size_t k = a.cols;
  const std::size_t n = b.rows;
  const double* arow = a.data + i * k;
  double* crow = c + i * n;
  for (std::size_t j = 0; j < n; ++j) {
    const double* brow = b.data + j * k;
    double acc = 0.0;
    for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
    crow[j] += acc;
  }
}

// Row i of A^T * B: sum over p of A[p, i] * B[p, :].
inline void row_tn(MatrixView a, MatrixView b, double* c, std::size_t i) {
  const std::size_t k = a.rows;
  const std::size_t m = a.cols;
  const std::size_t n = b.cols;
  double* crow = c + i * n;
  for (std::size_t p = 0; p < k; ++p) {
    const double api = a.data[p * m + i];
    if (api == 0.0) continue;
    const double* brow = b.data + p * n;
    for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
  }
}

inline double block_ssd(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

bool in_parallel() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return true;
#endif
}

}  // namespace

namespace serial {

void gemm_nn(MatrixView a, MatrixView b, double* c) {
  for (std::size_t i = 0; i < a.rows; ++i) row_nn(a, b, c, i);
}

void gemm_nt(MatrixView a, MatrixView b, double* c) {
  for (std::size_t i = 0; i < a.rows; ++i) row_nt(a, b, c, i);
}

void gemm_tn(MatrixView a, MatrixView b, double* c) {
  for (std::size_t i = 0; i < a.cols; ++i) row_tn(a, b, c, i);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t start = 0; start < a.size(); start += kReductionBlock) {
    const std::size_t len = std::min(kReductionBlock, a.size() - start);
    total += block_ssd(a.data() + start, b.data() + start, len);
  }
  return total;
}

}  // namespace serial

namespace parallel {

void gemm_nn(MatrixView a, MatrixView b, double* c) {
  const auto m = static_cast<long long>(a.rows);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) row_nn(a, b, c, static_cast<std::size_t>(i));
}

void gemm_nt(MatrixView a, MatrixView b, double* c) {
  const auto m = static_cast<long long>(a.rows);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) row_nt(a, b, c, static_cast<std::size_t>(i));
}

void gemm_tn(MatrixView a, MatrixView b, double* c) {
  const auto m = static_cast<long long>(a.cols);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < m; ++i) row_tn(a, b, c, static_cast<std::size_t>(i));
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t blocks = (a.size() + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);
  const auto nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long blk = 0; blk < nb; ++blk) {
    const std::size_t start = static_cast<std::size_t>(blk) * kReductionBlock;
    const std::size_t len = std::min(kReductionBlock, a.size() - start);
    partial[static_cast<std::size_t>(blk)] = block_ssd(a.data() + start, b.data() + start, len);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace parallel

void gemm_nn(MatrixView a, MatrixView b, double* c) {
  if (a.rows * a.cols * b.cols >= kParallelThreshold && a.rows > 1 && !in_parallel())
    parallel::gemm_nn(a, b, c);
  else
    serial::gemm_nn(a, b, c);
}

void gemm_nt(MatrixView a, MatrixView b, double* c) {
  if (a.rows * a.cols * b.rows >= kParallelThreshold && a.rows > 1 && !in_parallel())
    parallel::gemm_nt(a, b, c);
  else
    serial::gemm_nt(a, b, c);
}

void gemm_tn(MatrixView a, MatrixView b, double* c) {
  if (a.rows * a.cols * b.cols >= kParallelThreshold && a.cols > 1 && !in_parallel())
    parallel::gemm_tn(a, b, c);
  else
    serial::gemm_tn(a, b, c);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() >= 4 * kReductionBlock && !in_parallel()) return parallel::sum_squared_diff(a, b);
  return serial::sum_squared_diff(a, b);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace visir::kernels
