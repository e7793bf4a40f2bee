// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels. Sizes follow the model's hot shapes:
// token x embedding products and 240x240 tile resampling.

#include <benchmark/benchmark.h>

#include <vector>

#include "visir/data/resample.hpp"
#include "visir/numerics/kernels.hpp"
#include "visir/random.hpp"

namespace {

using visir::kernels::MatrixView;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  visir::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <void (*Gemm)(MatrixView, MatrixView, double*)>
void BM_GemmNN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1), b = random_values(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Gemm({a.data(), n, n}, {b.data(), n, n}, c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}
BENCHMARK(BM_GemmNN<visir::kernels::serial::gemm_nn>)->Name("gemm_nn/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_GemmNN<visir::kernels::parallel::gemm_nn>)->Name("gemm_nn/parallel")->Arg(64)->Arg(256);

template <void (*Gemm)(MatrixView, MatrixView, double*)>
void BM_GemmNT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 3), b = random_values(n * n, 4);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Gemm({a.data(), n, n}, {b.data(), n, n}, c.data());
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}
BENCHMARK(BM_GemmNT<visir::kernels::serial::gemm_nt>)->Name("gemm_nt/serial")->Arg(256);
BENCHMARK(BM_GemmNT<visir::kernels::parallel::gemm_nt>)->Name("gemm_nt/parallel")->Arg(256);

template <double (*Ssd)(std::span<const double>, std::span<const double>)>
void BM_SumSquaredDiff(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n, 5), b = random_values(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(Ssd(a, b));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n * sizeof(double)));
}
BENCHMARK(BM_SumSquaredDiff<visir::kernels::serial::sum_squared_diff>)
    ->Name("sum_squared_diff/serial")
    ->Arg(240 * 240 * 3);
BENCHMARK(BM_SumSquaredDiff<visir::kernels::parallel::sum_squared_diff>)
    ->Name("sum_squared_diff/parallel")
    ->Arg(240 * 240 * 3);

template <visir::Image (*Resample)(const visir::Image&, std::size_t)>
void BM_Bicubic(benchmark::State& state) {
  visir::Image tile(240, 240, 3, random_values(240 * 240 * 3, 7));
  for (double& v : tile.pixels) v = 0.5 + 0.5 * v;
  for (auto _ : state) benchmark::DoNotOptimize(Resample(tile, 4));
}
BENCHMARK(BM_Bicubic<visir::data::serial::bicubic_downsample>)->Name("bicubic_240_to_60/serial");
BENCHMARK(BM_Bicubic<visir::data::parallel::bicubic_downsample>)->Name("bicubic_240_to_60/parallel");

}  // namespace

BENCHMARK_MAIN();
