// SPDX-License-Identifier: Apache-2.0

#include "visir/model/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "visir/binary_io.hpp"
#include "visir/errors.hpp"

namespace visir::model {

namespace {
constexpr const char* kWhat = "checkpoint";
}

void save_checkpoint(const VisirModel& model, const std::string& path) {
  std::ostringstream os(std::ios::binary);
  os.write(kCheckpointMagic, 4);
  binary::write_u32(os, kCheckpointVersion);
  const std::string cfg = model.config.serialize();
  binary::write_u32(os, static_cast<std::uint32_t>(cfg.size()));
  binary::write_bytes(os, cfg);
  const auto params = model.named_parameters();
  binary::write_u32(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    binary::write_u32(os, static_cast<std::uint32_t>(name.size()));
    binary::write_bytes(os, name);
    binary::write_u32(os, static_cast<std::uint32_t>(t.rank()));
    for (std::size_t e : t.shape()) binary::write_u32(os, static_cast<std::uint32_t>(e));
    for (double v : t.values()) binary::write_f64(os, v);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open checkpoint for writing: " + path);
  const std::string bytes = os.str();
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw IoError("failed writing checkpoint: " + path);
}

VisirModel load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  binary::read_exact(is, magic, 4, kWhat);
  if (std::string(magic, 4) != std::string(kCheckpointMagic, 4))
    throw FormatError("checkpoint: bad magic in " + path);
  const std::uint32_t version = binary::read_u32(is, kWhat);
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  const std::uint32_t cfg_len = binary::read_u32(is, kWhat);
  const ModelConfig cfg = ModelConfig::deserialize(binary::read_string(is, cfg_len, kWhat));
  try {
    cfg.validate();
  } catch (const ContractError& e) {
    throw FormatError(std::string("checkpoint: stored configuration is invalid: ") + e.what());
  }

  VisirModel model = init_parameters(cfg, 0);
  auto expected = model.named_parameters();
  const std::uint32_t count = binary::read_u32(is, kWhat);
  if (count != expected.size())
    throw FormatError("checkpoint: " + std::to_string(count) + " parameters, configuration implies " +
                      std::to_string(expected.size()));
  for (auto& [name, tensor] : expected) {
    const std::uint32_t name_len = binary::read_u32(is, kWhat);
    const std::string stored = binary::read_string(is, name_len, kWhat);
    if (stored != name) throw FormatError("checkpoint: expected parameter " + name + ", found " + stored);
    const std::uint32_t rank = binary::read_u32(is, kWhat);
    numerics::Shape shape(rank);
    for (auto& e : shape) e = binary::read_u32(is, kWhat);
    if (shape != tensor.shape())
      throw FormatError("checkpoint: parameter " + name + " has extents " + numerics::shape_string(shape));
    auto values = tensor.mutable_values();
    for (double& v : values) v = binary::read_f64(is, kWhat);
  }
  return model;
}

VisirModel load_checkpoint(const std::string& path, const ModelConfig& expected) {
  VisirModel m = load_checkpoint(path);
  if (!(m.config == expected))
    throw ConfigMismatchError("checkpoint " + path + " was written for a different model configuration");
  return m;
}

}  // namespace visir::model
