// SPDX-License-Identifier: Apache-2.0

#include "visir/model/siren_inr.hpp"

#include <cmath>

#include "visir/errors.hpp"
#include "visir/numerics/ops.hpp"
#include "visir/random.hpp"

namespace visir::model {

Tensor make_coord_grid(std::size_t height, std::size_t width) {
  std::vector<double> v;
  v.reserve(height * width * 2);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      v.push_back(2.0 * (static_cast<double>(x) + 0.5) / static_cast<double>(width) - 1.0);
      v.push_back(2.0 * (static_cast<double>(y) + 0.5) / static_cast<double>(height) - 1.0);
    }
  return Tensor::from({height * width, 2}, std::move(v));
}

LayerStack init_siren_inr(const SirenInrConfig& config, std::uint64_t seed) {
  if (config.hidden_layers < 1 || config.hidden_dim == 0 || config.channels == 0 || !(config.omega0 > 0.0))
    throw ContractError("siren inr: invalid configuration");
  Rng rng(seed);
  LayerStack s;
  s.activation = Activation::Sine;
  s.head = OutputHead::UnitSine;
  s.omega0 = config.omega0;
  std::size_t fan_in = 2;
  for (std::size_t i = 0; i <= config.hidden_layers; ++i) {
    const std::size_t width = i == config.hidden_layers ? config.channels : config.hidden_dim;
    const double f = static_cast<double>(fan_in);
    const double bound = i == 0 ? 1.0 / f : std::sqrt(6.0 / f) / config.omega0;
    Dense d;
    std::vector<double> w(width * fan_in), b(width);
    for (double& x : w) x = rng.uniform(-bound, bound);
    for (double& x : b) x = rng.uniform(-bound, bound);
    d.weight = Tensor::from({width, fan_in}, std::move(w), true);
    d.bias = Tensor::from({width}, std::move(b), true);
    s.layers.push_back(std::move(d));
    fan_in = width;
  }
  return s;
}

Tensor siren_inr_forward(const Tensor& coords, const LayerStack& stack, std::size_t height, std::size_t width) {
  if (coords.rows() != height * width || coords.cols() != 2)
    throw DimensionError("siren_inr_forward: coordinate grid " + numerics::shape_string(coords.shape()) +
                         " does not match " + std::to_string(height) + "x" + std::to_string(width));
  const Tensor out = apply_stack(coords, stack);
  return numerics::reshape(out, {height, width, stack.out_dim()});
}

}  // namespace visir::model
