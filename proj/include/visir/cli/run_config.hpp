// SPDX-License-Identifier: Apache-2.0
// Run configuration shared by every subcommand. Keys live in sections
// ([model], [train], [data], [sweep], [run]) of a flat `key = value` file and
// can each be overridden with `--key value`.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "visir/data/dataset.hpp"
#include "visir/model/config.hpp"
#include "visir/training/training.hpp"

namespace visir::cli {

/// Unknown key, malformed value or bad config file syntax.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunPaths {
  std::filesystem::path data = "data";  ///< dataset directory (holds manifest.json)
  std::filesystem::path out = "out";
  std::filesystem::path checkpoint;     ///< defaults to <out>/checkpoint.vsck
  std::filesystem::path input;          ///< LR image for reconstruct
  std::filesystem::path hr;             ///< optional HR reference for reconstruct
};

struct RunConfig {
  model::ModelConfig model;
  training::TrainConfig train;
  data::DatasetConfig data;
  training::SweepSpec sweep;
  RunPaths paths;
  std::string split = "test";
  std::uint64_t seed = 0;
};

struct KeySpec {
  std::string name;
  std::string section;
  std::string help;
  bool is_path = false;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

/// Every accepted key, grouped by section.
const std::vector<KeySpec>& key_specs();
const KeySpec* find_key(const std::string& name);

/// Parsed `key -> value` text, with the directory relative paths resolve against.
struct Assignment {
  std::string value;
  std::filesystem::path base;
};
using Assignments = std::map<std::string, Assignment>;

/// Parses a config file. Throws ConfigError (syntax, unknown section or key,
/// key in the wrong section) or IoError (unreadable file).
Assignments parse_config_text(const std::string& text, const std::filesystem::path& base,
                              const std::string& origin = "config");
Assignments parse_config_file(const std::filesystem::path& path);

/// Applies assignments in order; path-valued keys are made absolute.
void apply_assignments(RunConfig& config, const Assignments& values);

/// `key = value` lines for every key, by section.
std::string dump_config(const RunConfig& config);

}  // namespace visir::cli
