// SPDX-License-Identifier: Apache-2.0

#include "visir/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "visir/errors.hpp"
#include "visir/numerics/kernels.hpp"

namespace visir::metrics {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b) || a.size() == 0)
    throw DimensionError(std::string(what) + ": image shapes differ (" + std::to_string(a.height) + "x" +
                         std::to_string(a.width) + "x" + std::to_string(a.channels) + " vs " +
                         std::to_string(b.height) + "x" + std::to_string(b.width) + "x" +
                         std::to_string(b.channels) + ")");
}

}  // namespace

SsimParams SsimParams::for_range(double max_value) {
  return {max_value, (0.01 * max_value) * (0.01 * max_value), (0.03 * max_value) * (0.03 * max_value)};
}

double mse(const Image& original, const Image& reconstructed) {
  require_same_shape(original, reconstructed, "mse");
  return kernels::sum_squared_diff(original.pixels, reconstructed.pixels) /
         static_cast<double>(original.size());
}

double psnr_from_mse(double mse_value, double max_value) {
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse_value);
}

double psnr(const Image& original, const Image& reconstructed, double max_value) {
  if (!(max_value > 0.0)) throw ContractError("psnr: max_value must be positive");
  return psnr_from_mse(mse(original, reconstructed), max_value);
}

double ssim(const Image& original, const Image& reconstructed, const SsimParams& params) {
  require_same_shape(original, reconstructed, "ssim");
  if (!(params.c1 > 0.0) || !(params.c2 > 0.0)) throw ContractError("ssim: C1 and C2 must be positive");
  const std::size_t channels = original.channels;
  const std::size_t n = original.height * original.width;
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t c = 0; c < channels; ++c) {
    double mu_o = 0.0, mu_r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mu_o += original.pixels[i * channels + c];
      mu_r += reconstructed.pixels[i * channels + c];
    }
    mu_o *= inv_n;
    mu_r *= inv_n;
    double var_o = 0.0, var_r = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dO = original.pixels[i * channels + c] - mu_o;
      const double dR = reconstructed.pixels[i * channels + c] - mu_r;
      var_o += dO * dO;
      var_r += dR * dR;
      cov += dO * dR;
    }
    var_o *= inv_n;
    var_r *= inv_n;
    cov *= inv_n;
    const double num = (2.0 * mu_o * mu_r + params.c1) * (2.0 * cov + params.c2);
    const double den = (mu_o * mu_o + mu_r * mu_r + params.c1) * (var_o + var_r + params.c2);
    total += num / den;
  }
  return total / static_cast<double>(channels);
}

MetricsReport evaluate_pair(const Image& original, const Image& reconstructed, double max_value) {
  MetricsReport r;
  r.mse = mse(original, reconstructed);
  r.psnr = psnr_from_mse(r.mse, max_value);
  r.ssim = ssim(original, reconstructed, SsimParams::for_range(max_value));
  return r;
}

}  // namespace visir::metrics
