// SPDX-License-Identifier: Apache-2.0

// Image-quality measures: MSE, PSNR and whole-image SSIM.

#pragma once

#include "visir/image.hpp"

namespace visir::metrics {

struct SsimParams {
  double max_value = 1.0;
  double c1 = (0.01 * 1.0) * (0.01 * 1.0);
  double c2 = (0.03 * 1.0) * (0.03 * 1.0);

  /// The usual (0.01 MAX)^2, (0.03 MAX)^2 constants for a dynamic range.
  static SsimParams for_range(double max_value);
};

struct MetricsReport {
  double mse = 0.0;
  double psnr = 0.0;  // +infinity when mse == 0
  double ssim = 0.0;
};

/// Mean over all pixels and channels of the squared difference.
double mse(const Image& original, const Image& reconstructed);

/// 10 log10(max^2 / mse) in dB; +infinity for identical images.
double psnr(const Image& original, const Image& reconstructed, double max_value = 1.0);
double psnr_from_mse(double mse, double max_value = 1.0);

/// SSIM with global per-channel statistics (population variance and
/// covariance), averaged over channels. No sliding window.
double ssim(const Image& original, const Image& reconstructed, const SsimParams& params = {});

MetricsReport evaluate_pair(const Image& original, const Image& reconstructed, double max_value = 1.0);

}  // namespace visir::metrics
