// SPDX-License-Identifier: Apache-2.0

// Raw grid files ("VSGR"):
//   magic "VSGR" | u32 version | u32 h | u32 w | u32 c
//   | u32 unit length | unit bytes | h*w*c little-endian f64, row-major HWC
//
// PNG export writes 8 bits per channel, value * 255 rounded half-up.

#pragma once

#include <cstdint>
#include <string>

#include "visir/data/field.hpp"
#include "visir/image.hpp"

namespace visir::data {

inline constexpr std::uint32_t kGridVersion = 1;

struct RawGrid {
  Image data;
  std::string units;
};

void write_grid(const std::string& path, const Image& data, const std::string& units = "");
/// Throws IoError (unreadable) or FormatError (bad magic/version, truncated).
RawGrid read_grid(const std::string& path);

/// Split a multi-channel grid into per-channel fields.
std::vector<FieldGrid> grid_fields(const RawGrid& grid);

/// Grey (1 channel) or RGB (3 channel) PNG; values outside [0, 1] are clamped.
void write_png(const std::string& path, const Image& img);
/// Reads any PNG as RGB (or grey for grey files) scaled to [0, 1].
Image read_png(const std::string& path);

/// 8-bit quantisation used by write_png.
std::uint8_t to_byte(double v);

/// Reads a .png file with read_png, anything else with read_grid.
Image read_image(const std::string& path);

}  // namespace visir::data
