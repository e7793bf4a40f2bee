// SPDX-License-Identifier: Apache-2.0

// The hybrid transformer/SIREN super-resolution network and its ViT-MLP
// ablation, which shares the exact parameter layout with GELU/sigmoid
// nonlinearities in place of the sine stacks.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "visir/image.hpp"
#include "visir/model/config.hpp"
#include "visir/model/layers.hpp"

namespace visir::model {

struct VisirModel {
  ModelConfig config;
  Dense embed;            // W_p [D x P*P*C], b_p [D]
  Tensor positions;       // [N x D], learned
  std::vector<EncoderBlock> blocks;
  LayerStack decoder;

  /// Stable, ordered (name, tensor) list. Names are the checkpoint keys.
  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;

  /// Deep copy. Plain copies share parameter storage.
  VisirModel clone() const;
};

/// Parameter count implied by a config, without building the model.
std::size_t parameter_count(const ModelConfig& config);

/// Seeded initialisation.
///  - sine layers: first layer of a stack U(-1/fan_in, 1/fan_in), deeper
///    layers U(-sqrt(6/fan_in)/omega0, +sqrt(6/fan_in)/omega0); biases use
///    the bound of their layer
///  - embedding, attention and all GELU/sigmoid layers: U(-1/sqrt(fan_in), +)
///    weights, zero biases
///  - positional encodings U(-0.02, 0.02); layer norm gain 1, shift 0
VisirModel init_parameters(const ModelConfig& config, std::uint64_t seed);

/// Patches -> embedding -> positions -> L encoder blocks. [N x D].
Tensor encode(const Image& lr, const VisirModel& model);

/// Encoder output -> HR tensor [H*scale, W*scale, C] with values in [0, 1].
Tensor decode_hr(const Tensor& tokens, const VisirModel& model);

/// encode + decode_hr for a sine-variant model.
Tensor forward(const Image& lr, const VisirModel& model);
/// encode + decode_hr for the ViT-MLP baseline variant.
Tensor vit_mlp_forward(const Image& lr, const VisirModel& model);
/// Dispatches on config.variant.
Tensor predict(const Image& lr, const VisirModel& model);

/// Inference convenience: predict() converted to an Image.
Image reconstruct(const Image& lr, const VisirModel& model);

Image to_image(const Tensor& hwc);
/// Constant tensor [H, W, C] holding the image's pixels.
Tensor to_tensor(const Image& img);

}  // namespace visir::model
