// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"
#include "visir/errors.hpp"
#include "visir/metrics.hpp"

namespace visir {
namespace {

using testing::random_image;

const Image kHandA(2, 2, 1, {0.0, 0.5, 1.0, 0.25});
const Image kHandB(2, 2, 1, {0.1, 0.5, 0.8, 0.25});

TEST(Mse, BasicCases) {
  const Image a = random_image(5, 4, 3, 1);
  EXPECT_EQ(metrics::mse(a, a), 0.0);
  EXPECT_EQ(metrics::mse(Image(3, 3, 3, 0.0), Image(3, 3, 3, 1.0)), 1.0);
}

TEST(Mse, HandCase) {
  // Correctly rounded value of the exact rational MSE of these binary inputs
  // (0.1 and 0.8 are not representable), which is 5.2e-18 below 0.0125.
  EXPECT_EQ(metrics::mse(kHandA, kHandB), 0.012499999999999995);
  EXPECT_DOUBLE_EQ(metrics::mse(kHandA, kHandB), 0.0125);
}

TEST(Mse, SymmetricAndPositive) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Image a = random_image(6, 5, 3, s), b = random_image(6, 5, 3, s + 100);
    EXPECT_EQ(metrics::mse(a, b), metrics::mse(b, a));
    EXPECT_GT(metrics::mse(a, b), 0.0);
  }
}

TEST(Mse, ShapeMismatchThrows) {
  EXPECT_THROW(metrics::mse(Image(2, 2, 1), Image(2, 2, 3)), DimensionError);
  EXPECT_THROW(metrics::mse(Image(), Image()), DimensionError);
}

TEST(Psnr, AnalyticValues) {
  EXPECT_EQ(metrics::psnr_from_mse(0.01, 1.0), 20.0);
  EXPECT_EQ(metrics::psnr_from_mse(1.0, 1.0), 0.0);
  const Image a = random_image(3, 3, 1, 2);
  EXPECT_EQ(metrics::psnr(a, a), std::numeric_limits<double>::infinity());
  EXPECT_NEAR(metrics::psnr(kHandA, kHandB), 19.030899869919434, 1e-12);
}

TEST(Psnr, StrictlyDecreasingInMse) {
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 1000; ++i) {
    const double value = metrics::psnr_from_mse(i * 1e-3);
    EXPECT_LT(value, previous);
    previous = value;
  }
}

TEST(Ssim, IdentityAndConstants) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Image a = random_image(8, 7, 3, s);
    EXPECT_NEAR(metrics::ssim(a, a), 1.0, 1e-9);
  }
  EXPECT_EQ(metrics::ssim(Image(4, 4, 3, 0.5), Image(4, 4, 3, 0.5)), 1.0);
}

TEST(Ssim, AnticorrelatedPairIsNegative) {
  // Zero-mean pattern scaled into [0, 1] and its flip 1 - x.
  Image x(8, 8, 1), flip(8, 8, 1);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t c = 0; c < 8; ++c) {
      x.at(y, c, 0) = 0.5 + 0.5 * std::sin(0.9 * static_cast<double>(y * 8 + c));
      flip.at(y, c, 0) = 1.0 - x.at(y, c, 0);
    }
  EXPECT_LT(metrics::ssim(x, flip), 0.0);
}

TEST(Ssim, Symmetric) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Image a = random_image(6, 6, 3, s), b = random_image(6, 6, 3, s + 50);
    EXPECT_NEAR(metrics::ssim(a, b), metrics::ssim(b, a), 1e-12);
  }
}

TEST(Ssim, ShiftInvariantForEqualMeans) {
  // With matched means the luminance term stays 1 under a common shift.
  Image a = random_image(6, 6, 1, 3), b = random_image(6, 6, 1, 4);
  for (double& v : a.pixels) v = 0.3 + 0.3 * v;
  for (double& v : b.pixels) v = 0.3 + 0.3 * v;
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a.pixels[i] / 36.0;
    mb += b.pixels[i] / 36.0;
  }
  for (double& v : b.pixels) v += ma - mb;
  Image a2 = a, b2 = b;
  for (double& v : a2.pixels) v += 0.05;
  for (double& v : b2.pixels) v += 0.05;
  EXPECT_NEAR(metrics::ssim(a, b), metrics::ssim(a2, b2), 1e-9);
}

TEST(EvaluatePair, MatchesIndividualMetrics) {
  const Image a = random_image(5, 5, 3, 9), b = random_image(5, 5, 3, 10);
  const auto r = metrics::evaluate_pair(a, b);
  EXPECT_EQ(r.mse, metrics::mse(a, b));
  EXPECT_EQ(r.psnr, metrics::psnr(a, b));
  EXPECT_EQ(r.ssim, metrics::ssim(a, b));
  const auto same = metrics::evaluate_pair(a, a);
  EXPECT_EQ(same.mse, 0.0);
  EXPECT_EQ(same.psnr, std::numeric_limits<double>::infinity());
  EXPECT_EQ(same.ssim, 1.0);
  const auto hand = metrics::evaluate_pair(kHandA, kHandB);
  EXPECT_DOUBLE_EQ(hand.mse, 0.0125);
  EXPECT_NEAR(hand.psnr, 19.03, 5e-3);
}

}  // namespace
}  // namespace visir
