// SPDX-License-Identifier: Apache-2.0

// Checkpoint file layout (all integers u32 little-endian):
//
//   "VSCK" | version | config length | ModelConfig::serialize() bytes
//   | parameter count | per parameter:
//       name length | name bytes | rank | extents... | f64 LE values
//
// Parameters appear in VisirModel::named_parameters() order.

#pragma once

#include <cstdint>
#include <string>

#include "visir/model/model.hpp"

namespace visir::model {

inline constexpr char kCheckpointMagic[4] = {'V', 'S', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Throws IoError if the file cannot be written.
void save_checkpoint(const VisirModel& model, const std::string& path);

/// Throws IoError (unreadable), FormatError (bad magic/version, truncated,
/// unexpected parameter names or extents).
VisirModel load_checkpoint(const std::string& path);

/// As above, and throws ConfigMismatchError unless the stored configuration
/// equals `expected`.
VisirModel load_checkpoint(const std::string& path, const ModelConfig& expected);

}  // namespace visir::model
