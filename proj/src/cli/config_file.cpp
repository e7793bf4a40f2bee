// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "visir/cli/run_config.hpp"
#include "visir/errors.hpp"

namespace visir::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(key + ": cannot parse '" + text + "' as a number");
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
  if (!text.empty() && text.front() == '-') throw ConfigError(key + ": must be non-negative, got '" + text + "'");
  return parse_number<std::size_t>(key, text);
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F parse) {
  std::vector<T> out;
  for (const auto& item : split_list(text)) out.push_back(parse(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_same_v<T, double>)
      out += training::format_number(values[i]);
    else if constexpr (std::is_same_v<T, std::string>)
      out += values[i];
    else
      out += std::to_string(values[i]);
  }
  return out;
}

// Binds a size_t / double / u64 member to a key.
#define VISIR_SIZE_KEY(section, field, expr, help)                                                  \
  KeySpec {                                                                                         \
    field, section, help, false,                                                                    \
        [](RunConfig& c, const std::string& v) { expr = parse_size(field, v); },                    \
        [](const RunConfig& c) { return std::to_string(expr); }                                     \
  }
#define VISIR_DOUBLE_KEY(section, field, expr, help)                                                \
  KeySpec {                                                                                         \
    field, section, help, false,                                                                    \
        [](RunConfig& c, const std::string& v) { expr = parse_number<double>(field, v); },          \
        [](const RunConfig& c) { return training::format_number(expr); }                            \
  }
#define VISIR_PATH_KEY(field, expr, help)                                                           \
  KeySpec {                                                                                         \
    field, "run", help, true, [](RunConfig& c, const std::string& v) { expr = v; },                 \
        [](const RunConfig& c) { return expr.string(); }                                            \
  }

std::vector<KeySpec> build_specs() {
  return {
      VISIR_SIZE_KEY("model", "patch_size", c.model.patch_size, "ViT patch edge P in LR pixels"),
      VISIR_SIZE_KEY("model", "num_layers", c.model.num_layers, "transformer encoder blocks L"),
      VISIR_SIZE_KEY("model", "num_heads", c.model.num_heads, "attention heads H"),
      VISIR_SIZE_KEY("model", "embed_dim", c.model.embed_dim, "token width D"),
      VISIR_DOUBLE_KEY("model", "omega0", c.model.omega0, "sine frequency of the decoder and feed-forward stacks"),
      VISIR_SIZE_KEY("model", "siren_hidden_layers", c.model.siren_hidden_layers, "decoder hidden layers (1..6)"),
      VISIR_SIZE_KEY("model", "siren_hidden_dim", c.model.siren_hidden_dim, "decoder hidden width"),
      VISIR_SIZE_KEY("model", "ffn_hidden_layers", c.model.ffn_hidden_layers, "encoder feed-forward hidden layers"),
      VISIR_SIZE_KEY("model", "ffn_hidden_dim", c.model.ffn_hidden_dim, "encoder feed-forward hidden width"),
      KeySpec{"decoder_mode", "model", "per_token | global_pooled", false,
              [](RunConfig& c, const std::string& v) { c.model.decoder_mode = model::parse_decoder_mode(v); },
              [](const RunConfig& c) { return model::to_string(c.model.decoder_mode); }},
      KeySpec{"norm_order", "model", "pre_norm | post_norm", false,
              [](RunConfig& c, const std::string& v) { c.model.norm_order = model::parse_norm_order(v); },
              [](const RunConfig& c) { return model::to_string(c.model.norm_order); }},
      KeySpec{"variant", "model", "visir | vit_mlp", false,
              [](RunConfig& c, const std::string& v) { c.model.variant = model::parse_variant(v); },
              [](const RunConfig& c) { return model::to_string(c.model.variant); }},
      VISIR_DOUBLE_KEY("model", "layer_norm_eps", c.model.layer_norm_eps, "layer norm epsilon"),

      VISIR_DOUBLE_KEY("train", "learning_rate", c.train.learning_rate, "Adam step size"),
      VISIR_SIZE_KEY("train", "steps", c.train.steps, "optimizer steps"),
      VISIR_SIZE_KEY("train", "batch_size", c.train.batch_size, "pairs per mini-batch"),
      VISIR_SIZE_KEY("train", "log_interval", c.train.log_interval, "loss curve sampling interval"),

      VISIR_SIZE_KEY("data", "num_sources", c.data.num_sources, "synthetic source grids"),
      VISIR_SIZE_KEY("data", "source_height", c.data.source_height, "synthetic source rows"),
      VISIR_SIZE_KEY("data", "source_width", c.data.source_width, "synthetic source columns"),
      VISIR_SIZE_KEY("data", "tile_height", c.data.tile_height, "HR tile rows"),
      VISIR_SIZE_KEY("data", "tile_width", c.data.tile_width, "HR tile columns"),
      VISIR_SIZE_KEY("data", "scale", c.data.scale, "downsampling factor"),
      VISIR_DOUBLE_KEY("data", "train_fraction", c.data.train_fraction, "share of pairs in the train split"),
      KeySpec{"source_files", "data", "comma-separated raw grid files replacing the synthetic sources", true,
              [](RunConfig& c, const std::string& v) { c.data.source_files = split_list(v); },
              [](const RunConfig& c) { return join(c.data.source_files); }},

      KeySpec{"frequencies", "sweep", "comma-separated omega0 values", false,
              [](RunConfig& c, const std::string& v) {
                c.sweep.frequencies = parse_list<double>("frequencies", v, parse_number<double>);
              },
              [](const RunConfig& c) { return join(c.sweep.frequencies); }},
      KeySpec{"hidden_layers", "sweep", "comma-separated decoder hidden layer counts", false,
              [](RunConfig& c, const std::string& v) {
                c.sweep.hidden_layers = parse_list<std::size_t>("hidden_layers", v, parse_size);
              },
              [](const RunConfig& c) { return join(c.sweep.hidden_layers); }},

      KeySpec{"seed", "run", "seed for data synthesis, initialization and batching", false,
              [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
              [](const RunConfig& c) { return std::to_string(c.seed); }},
      VISIR_PATH_KEY("data", c.paths.data, "dataset directory"),
      VISIR_PATH_KEY("out", c.paths.out, "output directory"),
      VISIR_PATH_KEY("checkpoint", c.paths.checkpoint, "checkpoint file (default <out>/checkpoint.vsck)"),
      VISIR_PATH_KEY("input", c.paths.input, "LR input image for reconstruct (.png or raw grid)"),
      VISIR_PATH_KEY("hr", c.paths.hr, "optional HR reference for reconstruct"),
      KeySpec{"split", "run", "dataset split for eval (train | test)", false,
              [](RunConfig& c, const std::string& v) {
                if (v != "train" && v != "test") throw ConfigError("split: expected train or test, got '" + v + "'");
                c.split = v;
              },
              [](const RunConfig& c) { return c.split; }},
  };
}

#undef VISIR_SIZE_KEY
#undef VISIR_DOUBLE_KEY
#undef VISIR_PATH_KEY

std::string resolve(const std::string& value, const fs::path& base) {
  if (value.empty()) return value;
  fs::path p(value);
  if (p.is_relative()) p = base / p;
  return p.lexically_normal().string();
}

}  // namespace

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = build_specs();
  return specs;
}

const KeySpec* find_key(const std::string& name) {
  for (const KeySpec& k : key_specs())
    if (k.name == name) return &k;
  return nullptr;
}

Assignments parse_config_text(const std::string& text, const fs::path& base, const std::string& origin) {
  static const std::vector<std::string> sections{"model", "train", "data", "sweep", "run"};
  Assignments out;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    std::string line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (std::find(sections.begin(), sections.end(), section) == sections.end())
        throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError(where + "unknown key '" + key + "'");
    if (!section.empty() && spec->section != section)
      throw ConfigError(where + "key '" + key + "' belongs in [" + spec->section + "], not [" + section + "]");
    out[key] = {value, base};
  }
  return out;
}

Assignments parse_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  const fs::path base = fs::absolute(path).parent_path();
  return parse_config_text(text.str(), base, path.string());
}

void apply_assignments(RunConfig& config, const Assignments& values) {
  for (const auto& [key, a] : values) {
    const KeySpec* spec = find_key(key);
    if (!spec) throw ConfigError("unknown key '" + key + "'");
    std::string value = a.value;
    if (spec->is_path) {
      if (key == "source_files") {
        std::vector<std::string> parts = split_list(value);
        for (auto& p : parts) p = resolve(p, a.base);
        value = join(parts);
      } else {
        value = resolve(value, a.base);
      }
    }
    try {
      spec->set(config, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
}

std::string dump_config(const RunConfig& config) {
  std::ostringstream os;
  std::string section;
  for (const KeySpec& k : key_specs()) {
    if (k.section != section) {
      if (!section.empty()) os << '\n';
      section = k.section;
      os << '[' << section << "]\n";
    }
    os << k.name << " = " << k.get(config) << '\n';
  }
  return os.str();
}

}  // namespace visir::cli
