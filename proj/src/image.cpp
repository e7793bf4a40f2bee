// SPDX-License-Identifier: Apache-2.0

#include "visir/image.hpp"

#include <string>

#include "visir/errors.hpp"

namespace visir {

Image::Image(std::size_t h, std::size_t w, std::size_t c, std::vector<double> values)
    : height(h), width(w), channels(c), pixels(std::move(values)) {
  if (pixels.size() != h * w * c)
    throw DimensionError("image " + std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) +
                         " cannot hold " + std::to_string(pixels.size()) + " values");
}

}  // namespace visir
