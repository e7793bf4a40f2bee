// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <exception>
#include <limits>

#include "visir/errors.hpp"
#include "visir/numerics/adam.hpp"
#include "visir/numerics/kernels.hpp"
#include "visir/numerics/ops.hpp"
#include "visir/random.hpp"
#include "visir/training/training.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace visir::training {

namespace ops = visir::numerics;
using model::VisirModel;
using numerics::Tensor;

namespace {

int worker_count() {
#ifdef _OPENMP
  return omp_in_parallel() ? 1 : omp_get_max_threads();
#else
  return 1;
#endif
}

int worker_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

void check_pair(const VisirModel& m, const data::SRPair& p) {
  const auto& c = m.config;
  if (p.lr.height != c.lr_height || p.lr.width != c.lr_width || p.lr.channels != c.channels ||
      p.hr.height != c.hr_height() || p.hr.width != c.hr_width() || p.hr.channels != c.channels)
    throw ContractError("pair " + p.id + " does not match the model's input/output shape");
}

// Forward + backward for one pair on `replica`; writes the gradient of the
// per-image MSE into `out` (one vector per parameter) and returns the loss.
double sample_gradient(VisirModel& replica, std::vector<Tensor>& params, const data::SRPair& pair,
                       std::vector<std::vector<double>>& out) {
  for (Tensor& p : params) p.zero_grad();
  const Tensor prediction = model::predict(pair.lr, replica);
  const Tensor target = model::to_tensor(pair.hr);
  const Tensor loss = ops::mse_loss(prediction, target);
  const double value = loss.item();
  numerics::backward(loss);
  out.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].has_grad())
      out[i].assign(params[i].grad().begin(), params[i].grad().end());
    else
      out[i].assign(params[i].size(), 0.0);
  }
  return value;
}

void copy_values(const std::vector<Tensor>& from, std::vector<Tensor>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto src = from[i].values();
    auto dst = to[i].mutable_values();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

// Mean loss and mean gradient over the listed samples, reduced in list order.
double batch_gradient(const VisirModel& model, std::span<const data::SRPair> pairs,
                      const std::vector<std::size_t>& batch, std::vector<VisirModel>& replicas,
                      std::vector<std::vector<double>>& mean_grad) {
  const std::vector<Tensor> master = model.parameters();
  const std::size_t b = batch.size();
  std::vector<std::vector<std::vector<double>>> per_sample(b);
  std::vector<double> losses(b, 0.0);
  std::vector<std::exception_ptr> errors(b);
  const int workers = std::min<int>(worker_count(), static_cast<int>(b));
  if (static_cast<int>(replicas.size()) < workers) replicas.resize(static_cast<std::size_t>(workers));
  std::vector<std::vector<Tensor>> worker_params(static_cast<std::size_t>(workers));
  for (std::size_t w = 0; w < worker_params.size(); ++w) {
    VisirModel& replica = replicas[w];
    if (replica.decoder.layers.empty() || !(replica.config == model.config)) replica = model.clone();
    worker_params[w] = replica.parameters();
    copy_values(master, worker_params[w]);
  }
  const auto nb = static_cast<long long>(b);
#pragma omp parallel for schedule(static) num_threads(workers)
  for (long long s = 0; s < nb; ++s) {
    const auto w = static_cast<std::size_t>(worker_index());
    const auto si = static_cast<std::size_t>(s);
    try {
      losses[si] = sample_gradient(replicas[w], worker_params[w], pairs[batch[si]], per_sample[si]);
    } catch (...) {
      errors[si] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  const double inv_b = 1.0 / static_cast<double>(b);
  mean_grad.assign(master.size(), {});
  for (std::size_t i = 0; i < master.size(); ++i) {
    mean_grad[i].assign(master[i].size(), 0.0);
    for (std::size_t s = 0; s < b; ++s)
      for (std::size_t j = 0; j < mean_grad[i].size(); ++j) mean_grad[i][j] += per_sample[s][i][j];
    for (double& g : mean_grad[i]) g *= inv_b;
  }
  double loss = 0.0;
  for (double l : losses) loss += l;
  return loss * inv_b;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ContractError("batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ContractError("learning_rate must be positive");
  if (log_interval == 0) throw ContractError("log_interval must be positive");
}

double loss_and_gradients(const VisirModel& model, std::span<const data::SRPair> pairs,
                          std::vector<std::vector<double>>* gradients) {
  if (pairs.empty()) throw ContractError("loss_and_gradients: no pairs");
  for (const auto& p : pairs) check_pair(model, p);
  std::vector<std::size_t> all(pairs.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<VisirModel> replicas;
  std::vector<std::vector<double>> grads;
  const double loss = batch_gradient(model, pairs, all, replicas, grads);
  if (gradients) *gradients = std::move(grads);
  return loss;
}

TrainResult train(VisirModel& model, std::span<const data::SRPair> pairs, const TrainConfig& config) {
  config.validate();
  if (pairs.empty()) throw ContractError("train: the training split is empty");
  for (const auto& p : pairs) check_pair(model, p);

  TrainResult result;
  result.final_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<Tensor> params = model.parameters();
  numerics::OptimizerState state({config.learning_rate});
  Rng rng(config.seed);
  std::vector<VisirModel> replicas;
  std::vector<std::vector<double>> grads;
  std::vector<std::size_t> batch(config.batch_size);

  for (std::size_t step = 1; step <= config.steps; ++step) {
    for (auto& i : batch) i = static_cast<std::size_t>(rng.below(pairs.size()));
    const double loss = batch_gradient(model, pairs, batch, replicas, grads);
    if (!std::isfinite(loss))
      throw DivergenceError("training diverged at step " + std::to_string(step) + " (loss " +
                            format_number(loss) + ")");
    numerics::adam_step(params, state, grads);
    result.final_loss = loss;
    if (step % config.log_interval == 0 || step == config.steps) result.curve.push_back({step, loss});
  }
  for (const Tensor& p : params)
    for (double v : p.values())
      if (!std::isfinite(v)) throw DivergenceError("training produced non-finite parameters");
  return result;
}

TrainResult train(VisirModel& model, const data::DatasetManifest& manifest, const std::filesystem::path& root,
                  const TrainConfig& config) {
  const auto pairs = data::load_pairs(manifest, root, "train");
  return train(model, pairs, config);
}

Image fit_siren_inr(const Image& lr, std::size_t scale, const model::SirenInrConfig& inr, const TrainConfig& config,
                    std::vector<LossPoint>* curve) {
  config.validate();
  if (lr.channels != inr.channels) throw ContractError("fit_siren_inr: channel count mismatch");
  model::LayerStack stack = model::init_siren_inr(inr, config.seed);
  std::vector<Tensor> params;
  for (const auto& d : stack.layers) {
    params.push_back(d.weight);
    params.push_back(d.bias);
  }
  const Tensor coords = model::make_coord_grid(lr.height, lr.width);
  const Tensor target = model::to_tensor(lr);
  numerics::OptimizerState state({config.learning_rate});
  for (std::size_t step = 1; step <= config.steps; ++step) {
    for (Tensor& p : params) p.zero_grad();
    const Tensor loss = ops::mse_loss(model::siren_inr_forward(coords, stack, lr.height, lr.width), target);
    const double value = loss.item();
    if (!std::isfinite(value)) throw DivergenceError("SIREN fit diverged at step " + std::to_string(step));
    numerics::backward(loss);
    numerics::adam_step(params, state);
    if (curve && (step % config.log_interval == 0 || step == config.steps)) curve->push_back({step, value});
  }
  const std::size_t hh = lr.height * scale, hw = lr.width * scale;
  return model::to_image(model::siren_inr_forward(model::make_coord_grid(hh, hw), stack, hh, hw));
}

Evaluation evaluate_siren_baseline(std::span<const data::SRPair> pairs, const model::SirenInrConfig& inr,
                                   const TrainConfig& config) {
  std::vector<ImageResult> images(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
  const auto n = static_cast<long long>(pairs.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    const auto& p = pairs[static_cast<std::size_t>(i)];
    try {
      const Image hr = fit_siren_inr(p.lr, p.scale, inr, config);
      images[static_cast<std::size_t>(i)] = {p.id, metrics::evaluate_pair(p.hr, hr)};
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return summarize(std::move(images));
}

}  // namespace visir::training
