// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "visir/image.hpp"

namespace visir::data {

/// One physical quantity on a regular grid (one value per grid point).
struct FieldGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;  // row-major
  std::string units;
};

struct NormalizationRange {
  double min = 0.0;
  double max = 1.0;
  bool operator==(const NormalizationRange&) const = default;
};

struct NormalizedField {
  Image channel;  // height x width x 1, values in [0, 1]
  NormalizationRange range;
};

/// (v - min) / (max - min). Throws ContractError for a constant field and
/// NonFiniteError for NaN/Inf values.
NormalizedField normalize_field(const FieldGrid& field);

/// R = temperature, G = shortwave flux, B = longwave flux. Each input is a
/// single-channel image; throws DimensionError on a shape mismatch.
Image assemble_rgb(const Image& temperature, const Image& shortwave, const Image& longwave);
/// Channel c of a multi-channel image as a single-channel image.
Image extract_channel(const Image& img, std::size_t channel);

/// A plane wave: amplitude * sin(2 pi f (x cos t / width + y sin t / height) + phase).
/// `frequency` counts cycles across the grid along the orientation.
struct SineComponent {
  double amplitude = 1.0;
  double frequency = 0.0;
  double orientation_deg = 0.0;
};

/// Smooth random background: `modes` plane waves with random frequency in
/// [0, max_frequency], random orientation and phase, total amplitude `amplitude`.
struct SmoothBackground {
  double amplitude = 0.0;
  std::size_t modes = 0;
  double max_frequency = 2.0;
};

struct SpectrumSpec {
  std::vector<SineComponent> components;
  std::optional<SmoothBackground> background;
};

/// Deterministic synthetic field: sum of the listed plane waves (random
/// phase per component) plus the optional background. Throws ContractError
/// for an empty spec or a zero-sized grid.
FieldGrid synth_field(std::uint64_t seed, std::size_t height, std::size_t width, const SpectrumSpec& spec,
                      std::string units = "arb");

}  // namespace visir::data
