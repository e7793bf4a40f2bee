// SPDX-License-Identifier: Apache-2.0

#include "visir/data/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "visir/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace visir::data {

std::vector<Image> tile_image(const Image& img, std::size_t tile_height, std::size_t tile_width) {
  if (tile_height == 0 || tile_width == 0 || img.height % tile_height != 0 || img.width % tile_width != 0)
    throw TilingError("tile " + std::to_string(tile_height) + "x" + std::to_string(tile_width) +
                      " does not divide image " + std::to_string(img.height) + "x" + std::to_string(img.width));
  std::vector<Image> tiles;
  const std::size_t rows = img.height / tile_height, cols = img.width / tile_width;
  tiles.reserve(rows * cols);
  const std::size_t row_len = tile_width * img.channels;
  for (std::size_t ty = 0; ty < rows; ++ty)
    for (std::size_t tx = 0; tx < cols; ++tx) {
      Image t(tile_height, tile_width, img.channels);
      for (std::size_t y = 0; y < tile_height; ++y) {
        const auto src = img.pixels.begin() + static_cast<std::ptrdiff_t>(img.index(ty * tile_height + y, tx * tile_width, 0));
        std::copy_n(src, row_len, t.pixels.begin() + static_cast<std::ptrdiff_t>(y * row_len));
      }
      tiles.push_back(std::move(t));
    }
  return tiles;
}

Image untile_image(const std::vector<Image>& tiles, std::size_t grid_rows, std::size_t grid_cols) {
  if (tiles.size() != grid_rows * grid_cols || tiles.empty())
    throw DimensionError("untile_image: " + std::to_string(tiles.size()) + " tiles for a " +
                         std::to_string(grid_rows) + "x" + std::to_string(grid_cols) + " grid");
  const Image& first = tiles.front();
  for (const Image& t : tiles)
    if (!t.same_shape(first)) throw DimensionError("untile_image: tiles differ in shape");
  Image img(grid_rows * first.height, grid_cols * first.width, first.channels);
  const std::size_t row_len = first.width * first.channels;
  for (std::size_t ty = 0; ty < grid_rows; ++ty)
    for (std::size_t tx = 0; tx < grid_cols; ++tx) {
      const Image& t = tiles[ty * grid_cols + tx];
      for (std::size_t y = 0; y < first.height; ++y)
        std::copy_n(t.pixels.begin() + static_cast<std::ptrdiff_t>(y * row_len), row_len,
                    img.pixels.begin() + static_cast<std::ptrdiff_t>(img.index(ty * first.height + y, tx * first.width, 0)));
    }
  return img;
}

double cubic_weight(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

namespace {

// Four clamped taps and weights for one output coordinate.
struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

std::vector<Taps> make_taps(std::size_t in_len, std::size_t out_len, std::size_t factor) {
  std::vector<Taps> taps(out_len);
  const auto last = static_cast<long long>(in_len) - 1;
  for (std::size_t j = 0; j < out_len; ++j) {
    const double center = (static_cast<double>(j) + 0.5) * static_cast<double>(factor) - 0.5;
    const double base = std::floor(center);
    const double t = center - base;
    for (int k = 0; k < 4; ++k) {
      const long long idx = static_cast<long long>(base) - 1 + k;
      taps[j].index[static_cast<std::size_t>(k)] = static_cast<std::size_t>(std::clamp(idx, 0LL, last));
      taps[j].weight[static_cast<std::size_t>(k)] = cubic_weight(t - static_cast<double>(k - 1));
    }
  }
  return taps;
}

// Weighted sum written relative to the tap at `base` (index 1), so that the
// weights' partition of unity makes constant inputs come out exactly.
inline double interpolate(const Taps& tp, const double* src, std::size_t stride) {
  const double ref = src[tp.index[1] * stride];
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k == 1) continue;
    acc += tp.weight[k] * (src[tp.index[k] * stride] - ref);
  }
  return ref + acc;
}

void check_factor(const Image& img, std::size_t factor) {
  if (factor == 0 || img.height % factor != 0 || img.width % factor != 0)
    throw TilingError("downsample factor " + std::to_string(factor) + " does not divide " +
                      std::to_string(img.height) + "x" + std::to_string(img.width));
}

void horizontal_row(const Image& img, const std::vector<Taps>& tx, Image& mid, std::size_t y) {
  const std::size_t c = img.channels;
  for (std::size_t x = 0; x < mid.width; ++x)
    for (std::size_t ch = 0; ch < c; ++ch)
      mid.at(y, x, ch) = interpolate(tx[x], img.pixels.data() + img.index(y, 0, ch), c);
}

void vertical_row(const Image& mid, const std::vector<Taps>& ty, Image& out, std::size_t y) {
  const std::size_t c = mid.channels;
  const std::size_t stride = mid.width * c;
  for (std::size_t x = 0; x < out.width; ++x)
    for (std::size_t ch = 0; ch < c; ++ch)
      out.at(y, x, ch) = std::clamp(interpolate(ty[y], mid.pixels.data() + x * c + ch, stride), 0.0, 1.0);
}

}  // namespace

namespace serial {

Image bicubic_downsample(const Image& img, std::size_t factor) {
  check_factor(img, factor);
  const std::size_t oh = img.height / factor, ow = img.width / factor;
  const auto tx = make_taps(img.width, ow, factor);
  const auto ty = make_taps(img.height, oh, factor);
  Image mid(img.height, ow, img.channels);
  for (std::size_t y = 0; y < img.height; ++y) horizontal_row(img, tx, mid, y);
  Image out(oh, ow, img.channels);
  for (std::size_t y = 0; y < oh; ++y) vertical_row(mid, ty, out, y);
  return out;
}

}  // namespace serial

namespace parallel {

Image bicubic_downsample(const Image& img, std::size_t factor) {
  check_factor(img, factor);
  const std::size_t oh = img.height / factor, ow = img.width / factor;
  const auto tx = make_taps(img.width, ow, factor);
  const auto ty = make_taps(img.height, oh, factor);
  Image mid(img.height, ow, img.channels);
  const auto ih = static_cast<long long>(img.height);
#pragma omp parallel for schedule(static)
  for (long long y = 0; y < ih; ++y) horizontal_row(img, tx, mid, static_cast<std::size_t>(y));
  Image out(oh, ow, img.channels);
  const auto ohl = static_cast<long long>(oh);
#pragma omp parallel for schedule(static)
  for (long long y = 0; y < ohl; ++y) vertical_row(mid, ty, out, static_cast<std::size_t>(y));
  return out;
}

}  // namespace parallel

Image bicubic_downsample(const Image& img, std::size_t factor) {
#ifdef _OPENMP
  if (img.size() >= (1u << 16) && !omp_in_parallel()) return parallel::bicubic_downsample(img, factor);
#endif
  return serial::bicubic_downsample(img, factor);
}

}  // namespace visir::data
