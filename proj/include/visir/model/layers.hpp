// SPDX-License-Identifier: Apache-2.0

// Building blocks of the encoder and decoders. All functions are
// differentiable through the numerics tape.

#pragma once

#include <cstddef>
#include <vector>

#include "visir/image.hpp"
#include "visir/numerics/tensor.hpp"

namespace visir::model {

using numerics::Tensor;

struct Dense {
  Tensor weight;  // [out x in]
  Tensor bias;    // [out]

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
};

enum class Activation { Sine, Gelu };

/// What the last layer of a stack does after its affine map.
enum class OutputHead {
  Linear,      ///< unbounded, for residual feed-forward sublayers
  UnitSine,    ///< (sin(omega0 * (W x + b)) + 1) / 2
  UnitSigmoid  ///< sigmoid(W x + b)
};

/// Ordered dense layers sharing one activation (and, for sine, one omega0).
/// For a sine stack this is the SIREN: hidden layers sin(omega0 (W x + b)).
struct LayerStack {
  std::vector<Dense> layers;
  Activation activation = Activation::Sine;
  OutputHead head = OutputHead::Linear;
  double omega0 = 20.0;

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }
  std::size_t hidden_layers() const { return layers.size() - 1; }
};

struct AttentionParams {
  Dense query, key, value, output;  // each [D x D]
};

struct NormParams {
  Tensor gain;   // [D]
  Tensor shift;  // [D]
};

struct EncoderBlock {
  NormParams norm1;
  AttentionParams attention;
  NormParams norm2;
  LayerStack ffn;
};

/// One SIREN layer: sin(omega0 * (x W^T + b)).
Tensor siren_layer(const Tensor& x, const Dense& layer, double omega0);

/// Applies a stack row-wise to x [n x in] -> [n x out].
Tensor apply_stack(const Tensor& x, const LayerStack& stack);

/// Sine feed-forward sublayer: sine hidden layers, final affine without sine.
/// Throws DimensionError if the stack is not a sine stack with a linear head
/// or if x does not match its input width.
Tensor siren_ffn(const Tensor& x, const LayerStack& stack);

/// Non-overlapping P x P patches in row-major grid order, each flattened as
/// (py, px, c) into one row: [N x P*P*C]. Throws TilingError if P does not
/// divide the image.
Tensor extract_patches(const Image& img, std::size_t patch_size);
/// Inverse of extract_patches.
Image assemble_patches(const Tensor& patches, std::size_t grid_rows, std::size_t grid_cols,
                       std::size_t patch_size, std::size_t channels);

/// token_i = W_p patch_i + b_p.
Tensor embed_patches(const Tensor& patches, const Tensor& w_p, const Tensor& b_p);
Tensor add_positional_encoding(const Tensor& tokens, const Tensor& positions);

/// Multi-head scaled dot-product self-attention with output projection.
Tensor mhsa(const Tensor& tokens, const AttentionParams& params, std::size_t num_heads);

/// Arithmetic mean over tokens: [N x D] -> [1 x D]. Throws on an empty sequence.
Tensor pool_tokens(const Tensor& tokens);

/// Gather indices that place per-token HR patches [N x (Q*Q*C)] (Q = P*scale)
/// into an HR image laid out as HWC.
std::vector<std::size_t> patch_placement_index(std::size_t grid_rows, std::size_t grid_cols,
                                               std::size_t out_patch, std::size_t channels);

}  // namespace visir::model
