// SPDX-License-Identifier: Apache-2.0

// Dataset construction: three physical fields per source are normalised
// per source grid, stacked as RGB (temperature, shortwave, longwave), cut
// into non-overlapping HR tiles and bicubically reduced to LR. Pairs are
// written as raw grid files next to a JSON manifest.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "visir/data/field.hpp"
#include "visir/image.hpp"

namespace visir::data {

struct SRPair {
  Image hr;
  Image lr;
  std::size_t scale = 1;
  std::string id;
};

struct DatasetConfig {
  /// Synthetic sources to generate when `source_files` is empty.
  std::size_t num_sources = 10;
  std::size_t source_height = 720;
  std::size_t source_width = 1440;
  std::size_t tile_height = 240;
  std::size_t tile_width = 240;
  std::size_t scale = 4;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  /// Spectrum used for each of the three synthetic fields.
  SpectrumSpec spectrum = default_spectrum();
  /// Raw 3-channel grid files (temperature, shortwave, longwave); when set
  /// they replace the synthetic generator.
  std::vector<std::string> source_files;

  static SpectrumSpec default_spectrum();
  /// Throws ContractError naming the offending key.
  void validate() const;
};

struct PairRecord {
  std::string id;
  std::size_t source = 0;
  std::size_t tile = 0;
  std::string hr_path;  // relative to the manifest directory
  std::string lr_path;
  std::string split;    // "train" | "test"
};

struct SourceRecord {
  std::string id;
  std::array<NormalizationRange, 3> ranges;
};

struct DatasetManifest {
  std::size_t scale = 4;
  std::size_t hr_height = 0, hr_width = 0;
  std::size_t lr_height = 0, lr_width = 0;
  std::size_t channels = 3;
  std::uint64_t seed = 0;
  std::vector<SourceRecord> sources;
  std::vector<PairRecord> pairs;

  std::vector<PairRecord> split(const std::string& name) const;
  std::string to_json() const;
  static DatasetManifest from_json(const std::string& text);
};

inline constexpr const char* kManifestName = "manifest.json";

/// Writes pairs under `out_dir/pairs/` and `out_dir/manifest.json`.
/// Throws ContractError on an empty source list or invalid config,
/// DimensionError on inconsistent source shapes, IoError on I/O failure.
DatasetManifest build_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir);

DatasetManifest load_manifest(const std::filesystem::path& manifest_path);

/// Loads the pairs of one split; paths resolve relative to `root`.
std::vector<SRPair> load_pairs(const DatasetManifest& manifest, const std::filesystem::path& root,
                               const std::string& split);

/// Build one SR pair in memory from an RGB source image (no files).
std::vector<SRPair> make_pairs(const Image& rgb, std::size_t tile_height, std::size_t tile_width, std::size_t scale,
                               const std::string& id_prefix);

/// The three normalised fields of one source, stacked as RGB.
Image synth_source_rgb(const DatasetConfig& config, std::size_t source_index,
                       std::array<NormalizationRange, 3>* ranges = nullptr);

/// Deterministic split: pairs ordered by a seeded hash of (source, tile);
/// the first round(train_fraction * n) are "train", the rest "test".
std::vector<std::string> assign_splits(const std::vector<std::pair<std::size_t, std::size_t>>& keys,
                                       std::uint64_t seed, double train_fraction);

}  // namespace visir::data
