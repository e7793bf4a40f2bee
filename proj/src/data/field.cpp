// SPDX-License-Identifier: Apache-2.0

#include "visir/data/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "visir/errors.hpp"
#include "visir/random.hpp"

namespace visir::data {

NormalizedField normalize_field(const FieldGrid& field) {
  if (field.values.empty() || field.values.size() != field.height * field.width)
    throw DimensionError("normalize_field: grid holds " + std::to_string(field.values.size()) + " values for " +
                         std::to_string(field.height) + "x" + std::to_string(field.width));
  for (double v : field.values)
    if (!std::isfinite(v)) throw NonFiniteError("normalize_field: non-finite value");
  const auto [lo, hi] = std::minmax_element(field.values.begin(), field.values.end());
  const double mn = *lo, mx = *hi;
  if (!(mx > mn)) throw ContractError("normalize_field: degenerate range (constant field)");
  NormalizedField out;
  out.range = {mn, mx};
  out.channel = Image(field.height, field.width, 1);
  const double span = mx - mn;
  for (std::size_t i = 0; i < field.values.size(); ++i) out.channel.pixels[i] = (field.values[i] - mn) / span;
  return out;
}

Image assemble_rgb(const Image& temperature, const Image& shortwave, const Image& longwave) {
  for (const Image* c : {&temperature, &shortwave, &longwave})
    if (c->channels != 1) throw DimensionError("assemble_rgb: inputs must be single-channel");
  if (!temperature.same_shape(shortwave) || !temperature.same_shape(longwave))
    throw DimensionError("assemble_rgb: channel shapes differ");
  Image rgb(temperature.height, temperature.width, 3);
  const std::size_t n = temperature.height * temperature.width;
  for (std::size_t i = 0; i < n; ++i) {
    rgb.pixels[3 * i + 0] = temperature.pixels[i];
    rgb.pixels[3 * i + 1] = shortwave.pixels[i];
    rgb.pixels[3 * i + 2] = longwave.pixels[i];
  }
  return rgb;
}

Image extract_channel(const Image& img, std::size_t channel) {
  if (channel >= img.channels) throw DimensionError("extract_channel: channel out of range");
  Image out(img.height, img.width, 1);
  for (std::size_t i = 0; i < img.height * img.width; ++i) out.pixels[i] = img.pixels[i * img.channels + channel];
  return out;
}

FieldGrid synth_field(std::uint64_t seed, std::size_t height, std::size_t width, const SpectrumSpec& spec,
                      std::string units) {
  const bool has_background = spec.background && spec.background->modes > 0;
  if (spec.components.empty() && !has_background) throw ContractError("synth_field: empty spectrum spec");
  if (height == 0 || width == 0) throw ContractError("synth_field: empty grid");

  struct Wave {
    double amplitude, kx, ky, phase;
  };
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  std::vector<Wave> waves;
  for (const SineComponent& c : spec.components) {
    const double theta = c.orientation_deg * std::numbers::pi / 180.0;
    waves.push_back({c.amplitude, kTwoPi * c.frequency * std::cos(theta) / static_cast<double>(width),
                     kTwoPi * c.frequency * std::sin(theta) / static_cast<double>(height), rng.uniform(0.0, kTwoPi)});
  }
  if (has_background) {
    const SmoothBackground& bg = *spec.background;
    const double amp = bg.amplitude / std::sqrt(static_cast<double>(bg.modes));
    for (std::size_t m = 0; m < bg.modes; ++m) {
      const double f = rng.uniform(0.0, bg.max_frequency);
      const double theta = rng.uniform(0.0, std::numbers::pi);
      const double phase = rng.uniform(0.0, kTwoPi);
      waves.push_back({amp, kTwoPi * f * std::cos(theta) / static_cast<double>(width),
                       kTwoPi * f * std::sin(theta) / static_cast<double>(height), phase});
    }
  }

  FieldGrid g;
  g.height = height;
  g.width = width;
  g.units = std::move(units);
  g.values.assign(height * width, 0.0);
  const auto h = static_cast<long long>(height);
#pragma omp parallel for schedule(static)
  for (long long y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      double v = 0.0;
      for (const Wave& w : waves)
        v += w.amplitude * std::sin(w.kx * static_cast<double>(x) + w.ky * static_cast<double>(y) + w.phase);
      g.values[static_cast<std::size_t>(y) * width + x] = v;
    }
  }
  return g;
}

}  // namespace visir::data
