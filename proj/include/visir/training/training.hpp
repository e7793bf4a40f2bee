// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "visir/data/dataset.hpp"
#include "visir/metrics.hpp"
#include "visir/model/model.hpp"
#include "visir/model/siren_inr.hpp"

namespace visir::training {

struct TrainConfig {
  double learning_rate = 1e-4;
  std::size_t steps = 1000;
  std::size_t batch_size = 4;
  std::uint64_t seed = 0;
  /// Record a loss-curve point every `log_interval` steps (and at the last step).
  std::size_t log_interval = 1;

  void validate() const;
};

struct LossPoint {
  std::size_t step = 0;
  double loss = 0.0;
};

struct TrainResult {
  std::vector<LossPoint> curve;
  double final_loss = 0.0;  // batch loss of the last step; NaN if no step ran
};

/// Adam on the mean per-image MSE of random mini-batches drawn (with a
/// seeded RNG) from `pairs`. Samples of a batch are processed by OpenMP
/// workers on private model replicas; gradients are reduced in sample order,
/// so results do not depend on the thread count.
/// Throws ContractError on an empty training set or mismatched shapes and
/// DivergenceError when the loss becomes non-finite.
TrainResult train(model::VisirModel& model, std::span<const data::SRPair> pairs, const TrainConfig& config);

/// Loads the train split of a manifest and trains on it.
TrainResult train(model::VisirModel& model, const data::DatasetManifest& manifest,
                  const std::filesystem::path& root, const TrainConfig& config);

/// Mean MSE loss of `pairs` and its gradient for every parameter, in
/// named_parameters() order.
double loss_and_gradients(const model::VisirModel& model, std::span<const data::SRPair> pairs,
                          std::vector<std::vector<double>>* gradients);

struct Summary {
  double max = 0.0;
  double mean = 0.0;
  double min = 0.0;
  std::size_t count = 0;          ///< values that entered the mean
  std::size_t infinite_count = 0; ///< +inf values excluded from the mean
};

struct ImageResult {
  std::string id;
  metrics::MetricsReport report;
};

struct Evaluation {
  std::vector<ImageResult> images;
  Summary mse, psnr, ssim;
};

/// Max / mean / min of each metric column. +inf PSNR values count toward
/// max but are excluded from the mean (and reported in infinite_count).
/// Throws ContractError for an empty list.
Evaluation summarize(std::vector<ImageResult> images);

/// Reconstruct every LR image and compare with its HR target.
Evaluation evaluate(const model::VisirModel& model, std::span<const data::SRPair> pairs);
Evaluation evaluate(const model::VisirModel& model, const data::DatasetManifest& manifest,
                    const std::filesystem::path& root, const std::string& split);

/// Per-image SIREN baseline: fit a coordinate network to the LR pixels
/// (coordinates of LR pixel centres), then sample it on the HR grid.
Image fit_siren_inr(const Image& lr, std::size_t scale, const model::SirenInrConfig& inr,
                    const TrainConfig& config, std::vector<LossPoint>* curve = nullptr);

/// Fits one SIREN per pair and evaluates it against the HR targets.
Evaluation evaluate_siren_baseline(std::span<const data::SRPair> pairs, const model::SirenInrConfig& inr,
                                   const TrainConfig& config);

// ---------------------------------------------------------------------------
// Hyperparameter sweep over omega0 x decoder hidden layers.

struct SweepSpec {
  std::vector<double> frequencies{10, 20, 30, 40, 50, 60};
  std::vector<std::size_t> hidden_layers{1, 2, 3, 4, 5, 6};
};

struct SweepCell {
  std::size_t hidden_layers = 0;
  double omega0 = 0.0;
  bool failed = false;
  double mean_psnr = 0.0;
  std::string error;
};

struct SweepGrid {
  std::vector<double> frequencies;
  std::vector<std::size_t> hidden_layers;
  std::vector<SweepCell> cells;  // row-major: hidden_layers x frequencies

  const SweepCell& cell(std::size_t layer_row, std::size_t freq_col) const {
    return cells[layer_row * frequencies.size() + freq_col];
  }
  /// Best non-failed cell by mean PSNR, or nullopt if every cell failed.
  std::optional<SweepCell> best() const;
  std::size_t succeeded() const;
};

/// Trains one model per cell from `base` (same seed and budget for every
/// cell) and records the mean test PSNR. Cells run in parallel; a failing
/// cell is marked and the sweep continues.
SweepGrid sweep(const model::ModelConfig& base, std::span<const data::SRPair> train_pairs,
                std::span<const data::SRPair> test_pairs, const TrainConfig& config, const SweepSpec& spec,
                std::uint64_t model_seed);

// ---------------------------------------------------------------------------
// CSV output (locale independent, '.' radix, "inf"/"nan" for non-finite).

std::string format_number(double v);
std::string loss_curve_csv(const std::vector<LossPoint>& curve);
std::string evaluation_csv(const Evaluation& eval);
/// Rows are hidden-layer counts, columns frequencies; failed cells read "failed".
std::string sweep_csv(const SweepGrid& grid);
/// Fixed-order MSE, PSNR, SSIM rows of max/mean/min.
std::string summary_table(const Evaluation& eval);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace visir::training
