// SPDX-License-Identifier: Apache-2.0

// Dense inner loops used by the tensor ops, the resampler and the metrics.
//
// Every kernel exists twice: a serial reference and an OpenMP version. The
// OpenMP versions partition the *output* and keep the per-element
// accumulation order of the serial loop, so both produce bit-identical
// results for any thread count (reductions use fixed-size blocks whose
// partial sums are combined in block order).

#pragma once

#include <cstddef>
#include <span>

namespace visir::kernels {

/// Row-major operand descriptor: `rows` x `cols`, contiguous.
struct MatrixView {
  const double* data;
  std::size_t rows;
  std::size_t cols;
};

namespace serial {

/// C (m x n) += A (m x k) * B (k x n)
void gemm_nn(MatrixView a, MatrixView b, double* c);
/// C (m x n) += A (m x k) * B^T, B is (n x k)
void gemm_nt(MatrixView a, MatrixView b, double* c);
/// C (m x n) += A^T * B, A is (k x m), B is (k x n)
void gemm_tn(MatrixView a, MatrixView b, double* c);

/// sum_i (a_i - b_i)^2, accumulated in fixed blocks.
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

}  // namespace serial

namespace parallel {

void gemm_nn(MatrixView a, MatrixView b, double* c);
void gemm_nt(MatrixView a, MatrixView b, double* c);
void gemm_tn(MatrixView a, MatrixView b, double* c);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

}  // namespace parallel

/// Block size used by the blocked reductions.
inline constexpr std::size_t kReductionBlock = 4096;

/// Work (multiply-adds) below which the dispatchers stay serial.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

// Dispatchers: choose the OpenMP path for large problems outside an already
// parallel region. Results are identical either way.
void gemm_nn(MatrixView a, MatrixView b, double* c);
void gemm_nt(MatrixView a, MatrixView b, double* c);
void gemm_tn(MatrixView a, MatrixView b, double* c);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

/// Number of OpenMP threads available to a parallel region (1 without OpenMP).
int max_threads();

}  // namespace visir::kernels
