// SPDX-License-Identifier: Apache-2.0

#include "visir/data/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "visir/binary_io.hpp"
#include "visir/errors.hpp"

namespace visir::data {

namespace {
constexpr const char* kWhat = "grid";
}

void write_grid(const std::string& path, const Image& data, const std::string& units) {
  std::ostringstream os(std::ios::binary);
  os.write("VSGR", 4);
  binary::write_u32(os, kGridVersion);
  binary::write_u32(os, static_cast<std::uint32_t>(data.height));
  binary::write_u32(os, static_cast<std::uint32_t>(data.width));
  binary::write_u32(os, static_cast<std::uint32_t>(data.channels));
  binary::write_u32(os, static_cast<std::uint32_t>(units.size()));
  binary::write_bytes(os, units);
  for (double v : data.pixels) binary::write_f64(os, v);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open grid file for writing: " + path);
  const std::string bytes = os.str();
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("failed writing grid file: " + path);
}

RawGrid read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open grid file: " + path);
  char magic[4];
  binary::read_exact(is, magic, 4, kWhat);
  if (std::memcmp(magic, "VSGR", 4) != 0) throw FormatError("grid: bad magic in " + path);
  const std::uint32_t version = binary::read_u32(is, kWhat);
  if (version != kGridVersion) throw FormatError("grid: unsupported version " + std::to_string(version));
  const std::size_t h = binary::read_u32(is, kWhat);
  const std::size_t w = binary::read_u32(is, kWhat);
  const std::size_t c = binary::read_u32(is, kWhat);
  const std::uint32_t unit_len = binary::read_u32(is, kWhat);
  RawGrid g;
  g.units = binary::read_string(is, unit_len, kWhat);
  g.data = Image(h, w, c);
  for (double& v : g.data.pixels) v = binary::read_f64(is, kWhat);
  return g;
}

std::vector<FieldGrid> grid_fields(const RawGrid& grid) {
  std::vector<FieldGrid> out;
  for (std::size_t c = 0; c < grid.data.channels; ++c) {
    FieldGrid f;
    f.height = grid.data.height;
    f.width = grid.data.width;
    f.units = grid.units;
    f.values = extract_channel(grid.data, c).pixels;
    out.push_back(std::move(f));
  }
  return out;
}

std::uint8_t to_byte(double v) {
  const double scaled = std::clamp(v, 0.0, 1.0) * 255.0;
  return static_cast<std::uint8_t>(std::floor(scaled + 0.5));
}

void write_png(const std::string& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3)
    throw DimensionError("write_png: only 1- or 3-channel images are supported");
  std::vector<std::uint8_t> bytes(img.size());
  std::transform(img.pixels.begin(), img.pixels.end(), bytes.begin(), to_byte);
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
    throw IoError("cannot write PNG " + path + ": " + image.message);
}

Image read_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw IoError("cannot read PNG " + path + ": " + image.message);
  const bool grey = (image.format & PNG_FORMAT_FLAG_COLOR) == 0;
  image.format = grey ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
  std::vector<std::uint8_t> bytes(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, bytes.data(), 0, nullptr)) {
    png_image_free(&image);
    throw FormatError("cannot decode PNG " + path + ": " + image.message);
  }
  Image out(image.height, image.width, grey ? 1 : 3);
  for (std::size_t i = 0; i < out.size(); ++i) out.pixels[i] = bytes[i] / 255.0;
  return out;
}

Image read_image(const std::string& path) {
  if (path.size() >= 4) {
    std::string ext = path.substr(path.size() - 4);
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") return read_png(path);
  }
  return read_grid(path).data;
}

}  // namespace visir::data
