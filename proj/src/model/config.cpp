// SPDX-License-Identifier: Apache-2.0

#include "visir/model/config.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "visir/errors.hpp"

namespace visir::model {

namespace {

std::string format_double(double v) {
  // Shortest round-trip representation; locale independent.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw FormatError("config: bad integer for " + key);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw FormatError("config: bad number for " + key);
  return out;
}

}  // namespace

void ModelConfig::validate(bool sweep_range) const {
  auto fail = [](const std::string& msg) { throw ContractError("model config: " + msg); };
  if (patch_size == 0) fail("patch_size must be positive");
  if (embed_dim == 0) fail("embed_dim must be positive");
  if (num_heads == 0 || embed_dim % num_heads != 0) fail("embed_dim must be divisible by num_heads");
  if (scale < 1) fail("scale must be at least 1");
  if (channels == 0) fail("channels must be positive");
  if (lr_height == 0 || lr_width == 0) fail("lr_height and lr_width must be positive");
  if (lr_height % patch_size != 0 || lr_width % patch_size != 0)
    fail("patch_size must divide lr_height and lr_width");
  if (siren_hidden_layers < 1 || siren_hidden_layers > 6) fail("siren_hidden_layers must be in [1, 6]");
  if (siren_hidden_dim == 0) fail("siren_hidden_dim must be positive");
  if (ffn_hidden_layers < 1) fail("ffn_hidden_layers must be at least 1");
  if (ffn_hidden_dim == 0) fail("ffn_hidden_dim must be positive");
  if (!(omega0 > 0.0)) fail("omega0 must be positive");
  if (sweep_range && (omega0 < 10.0 || omega0 > 60.0)) fail("omega0 outside [10, 60]");
  if (!(layer_norm_eps > 0.0)) fail("layer_norm_eps must be positive");
}

std::string ModelConfig::serialize() const {
  std::ostringstream os;
  os << "channels=" << channels << '\n'
     << "decoder_mode=" << to_string(decoder_mode) << '\n'
     << "embed_dim=" << embed_dim << '\n'
     << "ffn_hidden_dim=" << ffn_hidden_dim << '\n'
     << "ffn_hidden_layers=" << ffn_hidden_layers << '\n'
     << "layer_norm_eps=" << format_double(layer_norm_eps) << '\n'
     << "lr_height=" << lr_height << '\n'
     << "lr_width=" << lr_width << '\n'
     << "norm_order=" << to_string(norm_order) << '\n'
     << "num_heads=" << num_heads << '\n'
     << "num_layers=" << num_layers << '\n'
     << "omega0=" << format_double(omega0) << '\n'
     << "patch_size=" << patch_size << '\n'
     << "scale=" << scale << '\n'
     << "siren_hidden_dim=" << siren_hidden_dim << '\n'
     << "siren_hidden_layers=" << siren_hidden_layers << '\n'
     << "variant=" << to_string(variant) << '\n';
  return os.str();
}

ModelConfig ModelConfig::deserialize(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("config: malformed line '" + line + "'");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto take = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("config: missing key " + key);
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  ModelConfig c;
  c.channels = parse_size("channels", take("channels"));
  c.decoder_mode = parse_decoder_mode(take("decoder_mode"));
  c.embed_dim = parse_size("embed_dim", take("embed_dim"));
  c.ffn_hidden_dim = parse_size("ffn_hidden_dim", take("ffn_hidden_dim"));
  c.ffn_hidden_layers = parse_size("ffn_hidden_layers", take("ffn_hidden_layers"));
  c.layer_norm_eps = parse_double("layer_norm_eps", take("layer_norm_eps"));
  c.lr_height = parse_size("lr_height", take("lr_height"));
  c.lr_width = parse_size("lr_width", take("lr_width"));
  c.norm_order = parse_norm_order(take("norm_order"));
  c.num_heads = parse_size("num_heads", take("num_heads"));
  c.num_layers = parse_size("num_layers", take("num_layers"));
  c.omega0 = parse_double("omega0", take("omega0"));
  c.patch_size = parse_size("patch_size", take("patch_size"));
  c.scale = parse_size("scale", take("scale"));
  c.siren_hidden_dim = parse_size("siren_hidden_dim", take("siren_hidden_dim"));
  c.siren_hidden_layers = parse_size("siren_hidden_layers", take("siren_hidden_layers"));
  c.variant = parse_variant(take("variant"));
  if (!kv.empty()) throw FormatError("config: unknown key " + kv.begin()->first);
  return c;
}

std::string to_string(DecoderMode mode) { return mode == DecoderMode::PerToken ? "per_token" : "global_pooled"; }
std::string to_string(NormOrder order) { return order == NormOrder::PreNorm ? "pre_norm" : "post_norm"; }
std::string to_string(Variant variant) { return variant == Variant::Visir ? "visir" : "vit_mlp"; }

DecoderMode parse_decoder_mode(const std::string& text) {
  if (text == "per_token") return DecoderMode::PerToken;
  if (text == "global_pooled") return DecoderMode::GlobalPooled;
  throw FormatError("unknown decoder_mode '" + text + "' (per_token | global_pooled)");
}

NormOrder parse_norm_order(const std::string& text) {
  if (text == "pre_norm") return NormOrder::PreNorm;
  if (text == "post_norm") return NormOrder::PostNorm;
  throw FormatError("unknown norm_order '" + text + "' (pre_norm | post_norm)");
}

Variant parse_variant(const std::string& text) {
  if (text == "visir") return Variant::Visir;
  if (text == "vit_mlp") return Variant::VitMlp;
  throw FormatError("unknown variant '" + text + "' (visir | vit_mlp)");
}

}  // namespace visir::model
