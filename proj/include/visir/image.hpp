// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace visir {

/// Height x width x channels grid of intensities, stored row-major with
/// interleaved channels (HWC). Model inputs/outputs are unit-interval.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w, std::size_t c, double fill = 0.0)
      : height(h), width(w), channels(c), pixels(h * w * c, fill) {}
  Image(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values);

  std::size_t size() const { return pixels.size(); }
  std::size_t index(std::size_t y, std::size_t x, std::size_t c) const { return (y * width + x) * channels + c; }
  double& at(std::size_t y, std::size_t x, std::size_t c) { return pixels[index(y, x, c)]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const { return pixels[index(y, x, c)]; }

  bool same_shape(const Image& other) const {
    return height == other.height && width == other.width && channels == other.channels;
  }
  bool operator==(const Image&) const = default;
};

}  // namespace visir
