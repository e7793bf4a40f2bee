// SPDX-License-Identifier: Apache-2.0

#include "visir/model/model.hpp"

#include <cmath>
#include <string>

#include "visir/errors.hpp"
#include "visir/numerics/ops.hpp"
#include "visir/random.hpp"

namespace visir::model {

namespace ops = visir::numerics;

namespace {

Tensor uniform_tensor(numerics::Shape shape, double bound, Rng& rng) {
  std::vector<double> v(numerics::element_count(shape));
  for (double& x : v) x = rng.uniform(-bound, bound);
  return Tensor::from(std::move(shape), std::move(v), true);
}

Dense uniform_dense(std::size_t in, std::size_t out, double weight_bound, double bias_bound, Rng& rng) {
  Dense d;
  d.weight = uniform_tensor({out, in}, weight_bound, rng);
  d.bias = bias_bound > 0.0 ? uniform_tensor({out}, bias_bound, rng) : Tensor::zeros({out}, true);
  return d;
}

Dense standard_dense(std::size_t in, std::size_t out, Rng& rng) {
  return uniform_dense(in, out, 1.0 / std::sqrt(static_cast<double>(in)), 0.0, rng);
}

LayerStack make_stack(std::size_t in, std::size_t hidden_dim, std::size_t hidden_layers, std::size_t out,
                      const ModelConfig& cfg, bool decoder, Rng& rng) {
  LayerStack s;
  s.omega0 = cfg.omega0;
  if (cfg.variant == Variant::Visir) {
    s.activation = Activation::Sine;
    s.head = decoder ? OutputHead::UnitSine : OutputHead::Linear;
  } else {
    s.activation = Activation::Gelu;
    s.head = decoder ? OutputHead::UnitSigmoid : OutputHead::Linear;
  }
  std::size_t fan_in = in;
  for (std::size_t i = 0; i <= hidden_layers; ++i) {
    const std::size_t width = i == hidden_layers ? out : hidden_dim;
    if (cfg.variant == Variant::Visir) {
      const double f = static_cast<double>(fan_in);
      const double bound = i == 0 ? 1.0 / f : std::sqrt(6.0 / f) / cfg.omega0;
      s.layers.push_back(uniform_dense(fan_in, width, bound, bound, rng));
    } else {
      s.layers.push_back(standard_dense(fan_in, width, rng));
    }
    fan_in = width;
  }
  return s;
}

NormParams make_norm(std::size_t d) {
  return {Tensor::full({d}, 1.0, true), Tensor::zeros({d}, true)};
}

void append_dense(std::vector<std::pair<std::string, Tensor>>& out, const std::string& prefix, const Dense& d) {
  out.emplace_back(prefix + ".weight", d.weight);
  out.emplace_back(prefix + ".bias", d.bias);
}

void append_stack(std::vector<std::pair<std::string, Tensor>>& out, const std::string& prefix,
                  const LayerStack& s) {
  for (std::size_t i = 0; i < s.layers.size(); ++i) append_dense(out, prefix + "." + std::to_string(i), s.layers[i]);
}

Dense clone_dense(const Dense& d) { return {d.weight.clone(), d.bias.clone()}; }

LayerStack clone_stack(const LayerStack& s) {
  LayerStack c = s;
  for (Dense& d : c.layers) d = clone_dense(d);
  return c;
}

void check_input(const Image& lr, const ModelConfig& cfg) {
  if (lr.height != cfg.lr_height || lr.width != cfg.lr_width || lr.channels != cfg.channels)
    throw DimensionError("input " + std::to_string(lr.height) + "x" + std::to_string(lr.width) + "x" +
                         std::to_string(lr.channels) + " does not match model input " +
                         std::to_string(cfg.lr_height) + "x" + std::to_string(cfg.lr_width) + "x" +
                         std::to_string(cfg.channels));
}

Tensor encoder_block(const Tensor& x, const EncoderBlock& block, const ModelConfig& cfg) {
  const double eps = cfg.layer_norm_eps;
  auto ffn = [&](const Tensor& t) {
    return cfg.variant == Variant::Visir ? siren_ffn(t, block.ffn) : apply_stack(t, block.ffn);
  };
  if (cfg.norm_order == NormOrder::PreNorm) {
    Tensor h = ops::add(x, mhsa(ops::layer_norm(x, block.norm1.gain, block.norm1.shift, eps), block.attention,
                                cfg.num_heads));
    return ops::add(h, ffn(ops::layer_norm(h, block.norm2.gain, block.norm2.shift, eps)));
  }
  Tensor h = ops::layer_norm(ops::add(x, mhsa(x, block.attention, cfg.num_heads)), block.norm1.gain,
                             block.norm1.shift, eps);
  return ops::layer_norm(ops::add(h, ffn(h)), block.norm2.gain, block.norm2.shift, eps);
}

}  // namespace

std::vector<std::pair<std::string, Tensor>> VisirModel::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  append_dense(out, "embed", embed);
  out.emplace_back("positions", positions);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string p = "block" + std::to_string(b);
    const EncoderBlock& blk = blocks[b];
    out.emplace_back(p + ".norm1.gain", blk.norm1.gain);
    out.emplace_back(p + ".norm1.shift", blk.norm1.shift);
    append_dense(out, p + ".attn.query", blk.attention.query);
    append_dense(out, p + ".attn.key", blk.attention.key);
    append_dense(out, p + ".attn.value", blk.attention.value);
    append_dense(out, p + ".attn.output", blk.attention.output);
    out.emplace_back(p + ".norm2.gain", blk.norm2.gain);
    out.emplace_back(p + ".norm2.shift", blk.norm2.shift);
    append_stack(out, p + ".ffn", blk.ffn);
  }
  append_stack(out, "decoder", decoder);
  return out;
}

std::vector<Tensor> VisirModel::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

std::size_t VisirModel::parameter_count() const {
  std::size_t n = 0;
  for (auto& [name, t] : named_parameters()) n += t.size();
  return n;
}

VisirModel VisirModel::clone() const {
  VisirModel m;
  m.config = config;
  m.embed = clone_dense(embed);
  m.positions = positions.clone();
  for (const EncoderBlock& b : blocks) {
    EncoderBlock c;
    c.norm1 = {b.norm1.gain.clone(), b.norm1.shift.clone()};
    c.norm2 = {b.norm2.gain.clone(), b.norm2.shift.clone()};
    c.attention = {clone_dense(b.attention.query), clone_dense(b.attention.key), clone_dense(b.attention.value),
                   clone_dense(b.attention.output)};
    c.ffn = clone_stack(b.ffn);
    m.blocks.push_back(std::move(c));
  }
  m.decoder = clone_stack(decoder);
  return m;
}

std::size_t parameter_count(const ModelConfig& c) {
  auto dense = [](std::size_t in, std::size_t out) { return in * out + out; };
  auto stack = [&](std::size_t in, std::size_t hidden, std::size_t layers, std::size_t out) {
    std::size_t n = 0, fan = in;
    for (std::size_t i = 0; i <= layers; ++i) {
      const std::size_t w = i == layers ? out : hidden;
      n += dense(fan, w);
      fan = w;
    }
    return n;
  };
  const std::size_t d = c.embed_dim;
  std::size_t n = dense(c.patch_length(), d) + c.num_tokens() * d;
  n += c.num_layers * (4 * dense(d, d) + 4 * d + stack(d, c.ffn_hidden_dim, c.ffn_hidden_layers, d));
  const std::size_t out = c.decoder_mode == DecoderMode::PerToken
                              ? c.patch_size * c.scale * c.patch_size * c.scale * c.channels
                              : c.hr_height() * c.hr_width() * c.channels;
  n += stack(d, c.siren_hidden_dim, c.siren_hidden_layers, out);
  return n;
}

VisirModel init_parameters(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  VisirModel m;
  m.config = config;
  const std::size_t d = config.embed_dim;
  m.embed = standard_dense(config.patch_length(), d, rng);
  m.positions = uniform_tensor({config.num_tokens(), d}, 0.02, rng);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    EncoderBlock b;
    b.norm1 = make_norm(d);
    b.attention.query = standard_dense(d, d, rng);
    b.attention.key = standard_dense(d, d, rng);
    b.attention.value = standard_dense(d, d, rng);
    b.attention.output = standard_dense(d, d, rng);
    b.norm2 = make_norm(d);
    b.ffn = make_stack(d, config.ffn_hidden_dim, config.ffn_hidden_layers, d, config, false, rng);
    m.blocks.push_back(std::move(b));
  }
  const std::size_t out = config.decoder_mode == DecoderMode::PerToken
                              ? config.patch_size * config.scale * config.patch_size * config.scale * config.channels
                              : config.hr_height() * config.hr_width() * config.channels;
  m.decoder = make_stack(d, config.siren_hidden_dim, config.siren_hidden_layers, out, config, true, rng);
  return m;
}

Tensor encode(const Image& lr, const VisirModel& model) {
  const ModelConfig& cfg = model.config;
  check_input(lr, cfg);
  const Tensor patches = extract_patches(lr, cfg.patch_size);
  Tensor x = add_positional_encoding(embed_patches(patches, model.embed.weight, model.embed.bias), model.positions);
  for (const EncoderBlock& block : model.blocks) x = encoder_block(x, block, cfg);
  return x;
}

Tensor decode_hr(const Tensor& tokens, const VisirModel& model) {
  const ModelConfig& cfg = model.config;
  if (tokens.rows() != cfg.num_tokens() || tokens.cols() != cfg.embed_dim)
    throw DimensionError("decode_hr: tokens " + numerics::shape_string(tokens.shape()) +
                         " do not match the model configuration");
  const numerics::Shape hr_shape{cfg.hr_height(), cfg.hr_width(), cfg.channels};
  if (cfg.decoder_mode == DecoderMode::GlobalPooled)
    return ops::reshape(apply_stack(pool_tokens(tokens), model.decoder), hr_shape);
  const Tensor per_token = apply_stack(tokens, model.decoder);
  return ops::gather(per_token,
                     patch_placement_index(cfg.grid_rows(), cfg.grid_cols(), cfg.patch_size * cfg.scale, cfg.channels),
                     hr_shape);
}

Tensor forward(const Image& lr, const VisirModel& model) {
  if (model.config.variant != Variant::Visir) throw ContractError("forward() needs a sine-variant model");
  return decode_hr(encode(lr, model), model);
}

Tensor vit_mlp_forward(const Image& lr, const VisirModel& model) {
  if (model.config.variant != Variant::VitMlp) throw ContractError("vit_mlp_forward() needs a ViT-MLP model");
  return decode_hr(encode(lr, model), model);
}

Tensor predict(const Image& lr, const VisirModel& model) {
  return model.config.variant == Variant::Visir ? forward(lr, model) : vit_mlp_forward(lr, model);
}

Image reconstruct(const Image& lr, const VisirModel& model) { return to_image(predict(lr, model)); }

Image to_image(const Tensor& hwc) {
  if (hwc.rank() != 3) throw DimensionError("to_image: expected [H, W, C], got " + numerics::shape_string(hwc.shape()));
  const auto& s = hwc.shape();
  return Image(s[0], s[1], s[2], std::vector<double>(hwc.values().begin(), hwc.values().end()));
}

Tensor to_tensor(const Image& img) { return Tensor::from({img.height, img.width, img.channels}, img.pixels); }

}  // namespace visir::model
