// SPDX-License-Identifier: Apache-2.0

#include "visir/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "visir/data/io.hpp"
#include "visir/data/resample.hpp"
#include "visir/errors.hpp"
#include "visir/random.hpp"

namespace visir::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::array<const char*, 3> kChannelNames = {"surface_temperature", "shortwave_flux", "longwave_flux"};
const std::array<const char*, 3> kChannelUnits = {"K", "W m-2", "W m-2"};

std::string source_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "source_%03zu", i);
  return buf;
}

std::string pair_id(std::size_t source, std::size_t tile) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "source_%03zu_tile_%02zu", source, tile);
  return buf;
}

}  // namespace

SpectrumSpec DatasetConfig::default_spectrum() {
  SpectrumSpec s;
  s.background = SmoothBackground{1.0, 8, 4.0};
  s.components = {{0.3, 48.0, 30.0}, {0.2, 90.0, 110.0}};
  return s;
}

void DatasetConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& msg) { throw ContractError(key + ": " + msg); };
  if (source_files.empty() && num_sources == 0) fail("num_sources", "no sources to build from");
  if (scale == 0) fail("scale", "must be positive");
  if (tile_height == 0 || tile_height % scale != 0)
    fail("tile_height", std::to_string(tile_height) + " is not a positive multiple of scale " + std::to_string(scale));
  if (tile_width == 0 || tile_width % scale != 0)
    fail("tile_width", std::to_string(tile_width) + " is not a positive multiple of scale " + std::to_string(scale));
  if (source_files.empty()) {
    if (source_height % tile_height != 0)
      fail("tile_height", std::to_string(tile_height) + " does not divide source_height " + std::to_string(source_height));
    if (source_width % tile_width != 0)
      fail("tile_width", std::to_string(tile_width) + " does not divide source_width " + std::to_string(source_width));
    if (spectrum.components.empty() && !(spectrum.background && spectrum.background->modes > 0))
      fail("components", "empty spectrum");
  }
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) fail("train_fraction", "must lie in [0, 1]");
}

std::vector<PairRecord> DatasetManifest::split(const std::string& name) const {
  std::vector<PairRecord> out;
  for (const PairRecord& p : pairs)
    if (p.split == name) out.push_back(p);
  return out;
}

std::string DatasetManifest::to_json() const {
  json j;
  j["format"] = "visir-dataset";
  j["version"] = 1;
  j["scale"] = scale;
  j["channels"] = {kChannelNames[0], kChannelNames[1], kChannelNames[2]};
  j["hr"] = {{"height", hr_height}, {"width", hr_width}};
  j["lr"] = {{"height", lr_height}, {"width", lr_width}};
  j["seed"] = seed;
  json srcs = json::array();
  for (const SourceRecord& s : sources) {
    json ranges = json::array();
    for (const auto& r : s.ranges) ranges.push_back({{"min", r.min}, {"max", r.max}});
    srcs.push_back({{"id", s.id}, {"normalization", ranges}});
  }
  j["sources"] = srcs;
  json ps = json::array();
  for (const PairRecord& p : pairs)
    ps.push_back({{"id", p.id},
                  {"source", p.source},
                  {"tile", p.tile},
                  {"hr", p.hr_path},
                  {"lr", p.lr_path},
                  {"split", p.split}});
  j["pairs"] = ps;
  return j.dump(2) + "\n";
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
  DatasetManifest m;
  try {
    const json j = json::parse(text);
    if (j.value("format", "") != "visir-dataset") throw FormatError("manifest: unknown format");
    m.scale = j.at("scale").get<std::size_t>();
    m.channels = j.at("channels").size();
    m.hr_height = j.at("hr").at("height").get<std::size_t>();
    m.hr_width = j.at("hr").at("width").get<std::size_t>();
    m.lr_height = j.at("lr").at("height").get<std::size_t>();
    m.lr_width = j.at("lr").at("width").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const json& s : j.at("sources")) {
      SourceRecord r;
      r.id = s.at("id").get<std::string>();
      const json& ranges = s.at("normalization");
      if (ranges.size() != 3) throw FormatError("manifest: expected three normalization ranges");
      for (std::size_t c = 0; c < 3; ++c) r.ranges[c] = {ranges[c].at("min").get<double>(), ranges[c].at("max").get<double>()};
      m.sources.push_back(std::move(r));
    }
    for (const json& p : j.at("pairs")) {
      PairRecord r;
      r.id = p.at("id").get<std::string>();
      r.source = p.at("source").get<std::size_t>();
      r.tile = p.at("tile").get<std::size_t>();
      r.hr_path = p.at("hr").get<std::string>();
      r.lr_path = p.at("lr").get<std::string>();
      r.split = p.at("split").get<std::string>();
      m.pairs.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
  return m;
}

std::vector<std::string> assign_splits(const std::vector<std::pair<std::size_t, std::size_t>>& keys,
                                       std::uint64_t seed, double train_fraction) {
  const std::size_t n = keys.size();
  std::vector<std::uint64_t> hash(n);
  for (std::size_t i = 0; i < n; ++i)
    hash[i] = derive_seed(seed, (static_cast<std::uint64_t>(keys[i].first) << 32) ^ keys[i].second);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return hash[a] != hash[b] ? hash[a] < hash[b] : a < b;
  });
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<std::string> split(n);
  for (std::size_t r = 0; r < n; ++r) split[order[r]] = r < n_train ? "train" : "test";
  return split;
}

Image synth_source_rgb(const DatasetConfig& config, std::size_t source_index,
                       std::array<NormalizationRange, 3>* ranges) {
  std::array<Image, 3> channels;
  for (std::size_t c = 0; c < 3; ++c) {
    const FieldGrid f = synth_field(derive_seed(config.seed, source_index * 3 + c), config.source_height,
                                    config.source_width, config.spectrum, kChannelUnits[c]);
    NormalizedField nf = normalize_field(f);
    if (ranges) (*ranges)[c] = nf.range;
    channels[c] = std::move(nf.channel);
  }
  return assemble_rgb(channels[0], channels[1], channels[2]);
}

std::vector<SRPair> make_pairs(const Image& rgb, std::size_t tile_height, std::size_t tile_width, std::size_t scale,
                               const std::string& id_prefix) {
  std::vector<SRPair> out;
  std::size_t t = 0;
  for (Image& hr : tile_image(rgb, tile_height, tile_width)) {
    SRPair p;
    p.lr = bicubic_downsample(hr, scale);
    p.hr = std::move(hr);
    p.scale = scale;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "_tile_%02zu", t++);
    p.id = id_prefix + buf;
    out.push_back(std::move(p));
  }
  return out;
}

DatasetManifest build_dataset(const DatasetConfig& config, const fs::path& out_dir) {
  config.validate();
  std::error_code ec;
  fs::create_directories(out_dir / "pairs", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "pairs").string() + ": " + ec.message());

  const bool from_files = !config.source_files.empty();
  const std::size_t n_sources = from_files ? config.source_files.size() : config.num_sources;

  DatasetManifest m;
  m.scale = config.scale;
  m.hr_height = config.tile_height;
  m.hr_width = config.tile_width;
  m.lr_height = config.tile_height / config.scale;
  m.lr_width = config.tile_width / config.scale;
  m.seed = config.seed;
  m.sources.resize(n_sources);

  std::vector<std::vector<PairRecord>> per_source(n_sources);
  std::vector<std::exception_ptr> errors(n_sources);
  const auto ns = static_cast<long long>(n_sources);
#pragma omp parallel for schedule(dynamic)
  for (long long si = 0; si < ns; ++si) {
    const auto s = static_cast<std::size_t>(si);
    try {
      SourceRecord& rec = m.sources[s];
      rec.id = source_id(s);
      Image rgb;
      if (from_files) {
        const RawGrid g = read_grid(config.source_files[s]);
        if (g.data.channels != 3)
          throw DimensionError("source " + config.source_files[s] + " must hold 3 channels");
        const auto fields = grid_fields(g);
        std::array<Image, 3> ch;
        for (std::size_t c = 0; c < 3; ++c) {
          NormalizedField nf = normalize_field(fields[c]);
          rec.ranges[c] = nf.range;
          ch[c] = std::move(nf.channel);
        }
        rgb = assemble_rgb(ch[0], ch[1], ch[2]);
      } else {
        rgb = synth_source_rgb(config, s, &rec.ranges);
      }
      const auto pairs = make_pairs(rgb, config.tile_height, config.tile_width, config.scale, rec.id);
      for (std::size_t t = 0; t < pairs.size(); ++t) {
        PairRecord pr;
        pr.id = pair_id(s, t);
        pr.source = s;
        pr.tile = t;
        pr.hr_path = "pairs/" + pr.id + "_hr.vsgr";
        pr.lr_path = "pairs/" + pr.id + "_lr.vsgr";
        write_grid((out_dir / pr.hr_path).string(), pairs[t].hr, "unit");
        write_grid((out_dir / pr.lr_path).string(), pairs[t].lr, "unit");
        per_source[s].push_back(std::move(pr));
      }
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  for (auto& v : per_source)
    for (auto& p : v) m.pairs.push_back(std::move(p));
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (const PairRecord& p : m.pairs) keys.emplace_back(p.source, p.tile);
  const auto split = assign_splits(keys, config.seed, config.train_fraction);
  for (std::size_t i = 0; i < m.pairs.size(); ++i) m.pairs[i].split = split[i];

  std::ofstream os(out_dir / kManifestName, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in " + out_dir.string());
  os << m.to_json();
  if (!os) throw IoError("failed writing manifest in " + out_dir.string());
  return m;
}

DatasetManifest load_manifest(const fs::path& manifest_path) {
  std::ifstream is(manifest_path, std::ios::binary);
  if (!is) throw IoError("cannot open manifest " + manifest_path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return DatasetManifest::from_json(ss.str());
}

std::vector<SRPair> load_pairs(const DatasetManifest& manifest, const fs::path& root, const std::string& split) {
  std::vector<SRPair> out;
  for (const PairRecord& r : manifest.split(split)) {
    SRPair p;
    p.hr = read_grid((root / r.hr_path).string()).data;
    p.lr = read_grid((root / r.lr_path).string()).data;
    p.scale = manifest.scale;
    p.id = r.id;
    if (p.hr.height != p.lr.height * p.scale || p.hr.width != p.lr.width * p.scale ||
        p.lr.height != manifest.lr_height || p.lr.width != manifest.lr_width)
      throw DimensionError("pair " + r.id + " does not match the manifest dimensions");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace visir::data
