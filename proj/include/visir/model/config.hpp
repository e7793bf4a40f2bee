// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

namespace visir::model {

/// How the encoder output becomes an HR image.
enum class DecoderMode {
  PerToken,      ///< shared decoder maps each token to its (P*scale)^2*C output patch
  GlobalPooled,  ///< tokens averaged into one vector, decoded to the whole image
};

/// Placement of layer normalisation in a transformer block.
enum class NormOrder {
  PreNorm,   ///< x + f(LN(x))
  PostNorm,  ///< LN(x + f(x))
};

/// Which nonlinearity family fills the feed-forward and decoder stacks.
enum class Variant {
  Visir,   ///< sine activations with frequency omega0
  VitMlp,  ///< GELU hidden layers, sigmoid output (ViT baseline)
};

struct ModelConfig {
  std::size_t patch_size = 4;
  std::size_t num_layers = 1;
  std::size_t num_heads = 2;
  std::size_t embed_dim = 32;
  double omega0 = 20.0;
  std::size_t siren_hidden_layers = 2;  ///< decoder hidden layers
  std::size_t siren_hidden_dim = 64;
  std::size_t ffn_hidden_layers = 1;
  std::size_t ffn_hidden_dim = 64;
  std::size_t scale = 4;
  std::size_t channels = 3;
  std::size_t lr_height = 16;
  std::size_t lr_width = 16;
  DecoderMode decoder_mode = DecoderMode::PerToken;
  NormOrder norm_order = NormOrder::PreNorm;
  Variant variant = Variant::Visir;
  double layer_norm_eps = 1e-5;

  /// Throws ContractError naming the first violated constraint.
  /// `sweep_range` additionally restricts omega0 to [10, 60].
  void validate(bool sweep_range = false) const;

  std::size_t grid_rows() const { return lr_height / patch_size; }
  std::size_t grid_cols() const { return lr_width / patch_size; }
  std::size_t num_tokens() const { return grid_rows() * grid_cols(); }
  std::size_t patch_length() const { return patch_size * patch_size * channels; }
  std::size_t hr_height() const { return lr_height * scale; }
  std::size_t hr_width() const { return lr_width * scale; }
  std::size_t head_dim() const { return embed_dim / num_heads; }

  /// Canonical `key=value` lines in a fixed order; the checkpoint header.
  std::string serialize() const;
  static ModelConfig deserialize(const std::string& text);

  bool operator==(const ModelConfig&) const = default;
};

std::string to_string(DecoderMode mode);
std::string to_string(NormOrder order);
std::string to_string(Variant variant);
DecoderMode parse_decoder_mode(const std::string& text);
NormOrder parse_norm_order(const std::string& text);
Variant parse_variant(const std::string& text);

}  // namespace visir::model
