// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "visir/image.hpp"

namespace visir::data {

/// Row-major, non-overlapping tiles. Throws TilingError unless the tile
/// extents divide the image extents.
std::vector<Image> tile_image(const Image& img, std::size_t tile_height, std::size_t tile_width);

/// Inverse of tile_image for a `grid_rows` x `grid_cols` tile grid.
Image untile_image(const std::vector<Image>& tiles, std::size_t grid_rows, std::size_t grid_cols);

/// Catmull-Rom (a = -0.5) cubic kernel weight.
double cubic_weight(double x);

/// Reduce both extents by `factor`: separable Catmull-Rom interpolation
/// evaluated at output pixel centres (input coordinate (j + 0.5) * factor - 0.5),
/// edge-clamped taps, output clamped to [0, 1]. Constant images are
/// reproduced exactly. Throws TilingError unless `factor` divides both extents.
Image bicubic_downsample(const Image& img, std::size_t factor);

namespace serial {
Image bicubic_downsample(const Image& img, std::size_t factor);
}
namespace parallel {
Image bicubic_downsample(const Image& img, std::size_t factor);
}

}  // namespace visir::data
