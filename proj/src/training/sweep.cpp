// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "visir/errors.hpp"
#include "visir/training/training.hpp"

namespace visir::training {

std::optional<SweepCell> SweepGrid::best() const {
  std::optional<SweepCell> out;
  for (const SweepCell& c : cells) {
    if (c.failed) continue;
    if (!out || c.mean_psnr > out->mean_psnr) out = c;
  }
  return out;
}

std::size_t SweepGrid::succeeded() const {
  std::size_t n = 0;
  for (const SweepCell& c : cells) n += c.failed ? 0 : 1;
  return n;
}

SweepGrid sweep(const model::ModelConfig& base, std::span<const data::SRPair> train_pairs,
                std::span<const data::SRPair> test_pairs, const TrainConfig& config, const SweepSpec& spec,
                std::uint64_t model_seed) {
  if (spec.frequencies.empty() || spec.hidden_layers.empty()) throw ContractError("sweep: empty grid");
  SweepGrid grid;
  grid.frequencies = spec.frequencies;
  grid.hidden_layers = spec.hidden_layers;
  const std::size_t cols = spec.frequencies.size();
  grid.cells.resize(spec.hidden_layers.size() * cols);
  for (std::size_t r = 0; r < spec.hidden_layers.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      grid.cells[r * cols + c].hidden_layers = spec.hidden_layers[r];
      grid.cells[r * cols + c].omega0 = spec.frequencies[c];
    }

  const auto n = static_cast<long long>(grid.cells.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    SweepCell& cell = grid.cells[static_cast<std::size_t>(i)];
    try {
      model::ModelConfig cfg = base;
      cfg.omega0 = cell.omega0;
      cfg.siren_hidden_layers = cell.hidden_layers;
      model::VisirModel m = model::init_parameters(cfg, model_seed);
      train(m, train_pairs, config);
      const Evaluation e = evaluate(m, test_pairs);
      if (std::isnan(e.psnr.mean)) throw DivergenceError("non-finite test PSNR");
      cell.mean_psnr = e.psnr.mean;
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
  }
  return grid;
}

}  // namespace visir::training
