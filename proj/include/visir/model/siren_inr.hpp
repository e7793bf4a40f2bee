// SPDX-License-Identifier: Apache-2.0

// Coordinate-based SIREN baseline: a per-image implicit representation
// (x, y) -> C fitted to the LR pixels and sampled on the HR grid.

#pragma once

#include <cstdint>

#include "visir/image.hpp"
#include "visir/model/layers.hpp"

namespace visir::model {

struct SirenInrConfig {
  std::size_t hidden_layers = 2;
  std::size_t hidden_dim = 64;
  std::size_t channels = 3;
  double omega0 = 20.0;
};

/// Pixel-centre coordinates of an h x w grid normalised to [-1, 1]^2, one
/// (x, y) row per pixel in row-major order: [h*w x 2].
Tensor make_coord_grid(std::size_t height, std::size_t width);

/// Sine stack 2 -> hidden -> ... -> channels with a unit-sine output head.
LayerStack init_siren_inr(const SirenInrConfig& config, std::uint64_t seed);

/// Evaluates the stack at every coordinate: [height, width, C].
Tensor siren_inr_forward(const Tensor& coords, const LayerStack& stack, std::size_t height, std::size_t width);

}  // namespace visir::model
