// SPDX-License-Identifier: Apache-2.0

#include "visir/model/layers.hpp"

#include <cmath>
#include <string>

#include "visir/errors.hpp"
#include "visir/numerics/ops.hpp"

namespace visir::model {

namespace ops = visir::numerics;

Tensor siren_layer(const Tensor& x, const Dense& layer, double omega0) {
  return ops::sine_activation(ops::linear(x, layer.weight, layer.bias), omega0);
}

Tensor apply_stack(const Tensor& x, const LayerStack& stack) {
  if (stack.layers.empty()) throw DimensionError("layer stack is empty");
  if (x.cols() != stack.in_dim())
    throw DimensionError("stack input width " + std::to_string(x.cols()) + " != " +
                         std::to_string(stack.in_dim()));
  Tensor h = x;
  for (std::size_t i = 0; i + 1 < stack.layers.size(); ++i) {
    const Dense& layer = stack.layers[i];
    if (h.cols() != layer.in_dim()) throw DimensionError("stack layer " + std::to_string(i) + " does not chain");
    if (stack.activation == Activation::Sine)
      h = siren_layer(h, layer, stack.omega0);
    else
      h = ops::gelu(ops::linear(h, layer.weight, layer.bias));
  }
  const Dense& last = stack.layers.back();
  if (h.cols() != last.in_dim()) throw DimensionError("stack output layer does not chain");
  switch (stack.head) {
    case OutputHead::Linear:
      return ops::linear(h, last.weight, last.bias);
    case OutputHead::UnitSine:
      return ops::scale(ops::add_scalar(siren_layer(h, last, stack.omega0), 1.0), 0.5);
    case OutputHead::UnitSigmoid:
      return ops::sigmoid(ops::linear(h, last.weight, last.bias));
  }
  throw ContractError("unknown output head");
}

Tensor siren_ffn(const Tensor& x, const LayerStack& stack) {
  if (stack.activation != Activation::Sine || stack.head != OutputHead::Linear)
    throw DimensionError("siren_ffn needs a sine stack with a linear output layer");
  return apply_stack(x, stack);
}

Tensor extract_patches(const Image& img, std::size_t patch_size) {
  if (patch_size == 0 || img.height % patch_size != 0 || img.width % patch_size != 0)
    throw TilingError("patch size " + std::to_string(patch_size) + " does not divide " +
                      std::to_string(img.height) + "x" + std::to_string(img.width));
  const std::size_t gr = img.height / patch_size, gc = img.width / patch_size;
  const std::size_t len = patch_size * patch_size * img.channels;
  std::vector<double> out;
  out.reserve(gr * gc * len);
  for (std::size_t ty = 0; ty < gr; ++ty)
    for (std::size_t tx = 0; tx < gc; ++tx)
      for (std::size_t py = 0; py < patch_size; ++py)
        for (std::size_t px = 0; px < patch_size; ++px)
          for (std::size_t c = 0; c < img.channels; ++c)
            out.push_back(img.at(ty * patch_size + py, tx * patch_size + px, c));
  return Tensor::from({gr * gc, len}, std::move(out));
}

Image assemble_patches(const Tensor& patches, std::size_t grid_rows, std::size_t grid_cols,
                       std::size_t patch_size, std::size_t channels) {
  const std::size_t len = patch_size * patch_size * channels;
  if (patches.rows() != grid_rows * grid_cols || patches.cols() != len)
    throw DimensionError("assemble_patches: patch matrix does not match the grid");
  Image img(grid_rows * patch_size, grid_cols * patch_size, channels);
  const auto v = patches.values();
  std::size_t k = 0;
  for (std::size_t ty = 0; ty < grid_rows; ++ty)
    for (std::size_t tx = 0; tx < grid_cols; ++tx)
      for (std::size_t py = 0; py < patch_size; ++py)
        for (std::size_t px = 0; px < patch_size; ++px)
          for (std::size_t c = 0; c < channels; ++c)
            img.at(ty * patch_size + py, tx * patch_size + px, c) = v[k++];
  return img;
}

Tensor embed_patches(const Tensor& patches, const Tensor& w_p, const Tensor& b_p) {
  if (w_p.rank() != 2 || w_p.cols() != patches.cols() || b_p.size() != w_p.rows())
    throw DimensionError("embed_patches: W_p " + numerics::shape_string(w_p.shape()) + " / b_p " +
                         numerics::shape_string(b_p.shape()) + " do not fit patches " +
                         numerics::shape_string(patches.shape()));
  return ops::linear(patches, w_p, b_p);
}

Tensor add_positional_encoding(const Tensor& tokens, const Tensor& positions) {
  return ops::add(tokens, positions);
}

Tensor mhsa(const Tensor& tokens, const AttentionParams& p, std::size_t num_heads) {
  const std::size_t d = tokens.cols();
  if (num_heads == 0 || d % num_heads != 0)
    throw DimensionError("mhsa: embedding width " + std::to_string(d) + " not divisible by " +
                         std::to_string(num_heads) + " heads");
  const std::size_t hd = d / num_heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(hd));
  const Tensor q = ops::linear(tokens, p.query.weight, p.query.bias);
  const Tensor k = ops::linear(tokens, p.key.weight, p.key.bias);
  const Tensor v = ops::linear(tokens, p.value.weight, p.value.bias);
  std::vector<Tensor> heads;
  heads.reserve(num_heads);
  for (std::size_t h = 0; h < num_heads; ++h) {
    const Tensor qh = num_heads == 1 ? q : ops::slice_cols(q, h * hd, hd);
    const Tensor kh = num_heads == 1 ? k : ops::slice_cols(k, h * hd, hd);
    const Tensor vh = num_heads == 1 ? v : ops::slice_cols(v, h * hd, hd);
    // scores = q k^T / sqrt(hd); linear() with an undefined bias gives q k^T.
    const Tensor scores = ops::scale(ops::linear(qh, kh, Tensor{}), inv_sqrt);
    const Tensor weights = ops::softmax(scores, 1);
    heads.push_back(ops::matmul(weights, vh));
  }
  const Tensor merged = num_heads == 1 ? heads.front() : ops::concat_cols(heads);
  return ops::linear(merged, p.output.weight, p.output.bias);
}

Tensor pool_tokens(const Tensor& tokens) {
  if (!tokens.defined() || tokens.size() == 0) throw DimensionError("pool_tokens: empty sequence");
  return ops::mean_rows(tokens);
}

std::vector<std::size_t> patch_placement_index(std::size_t grid_rows, std::size_t grid_cols,
                                               std::size_t out_patch, std::size_t channels) {
  const std::size_t width = grid_cols * out_patch;
  const std::size_t per_token = out_patch * out_patch * channels;
  std::vector<std::size_t> index(grid_rows * grid_cols * per_token);
  for (std::size_t ty = 0; ty < grid_rows; ++ty)
    for (std::size_t tx = 0; tx < grid_cols; ++tx) {
      const std::size_t token = ty * grid_cols + tx;
      for (std::size_t py = 0; py < out_patch; ++py)
        for (std::size_t px = 0; px < out_patch; ++px)
          for (std::size_t c = 0; c < channels; ++c) {
            const std::size_t y = ty * out_patch + py, x = tx * out_patch + px;
            index[(y * width + x) * channels + c] = token * per_token + (py * out_patch + px) * channels + c;
          }
    }
  return index;
}

}  // namespace visir::model
