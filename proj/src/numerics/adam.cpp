// SPDX-License-Identifier: Apache-2.0

#include "visir/numerics/adam.hpp"

#include <cmath>

#include "visir/errors.hpp"

namespace visir::numerics {

void adam_step(std::vector<Tensor>& params, OptimizerState& state,
               const std::vector<std::vector<double>>& grads) {
  if (grads.size() != params.size())
    throw DimensionError("adam_step: " + std::to_string(grads.size()) + " gradients for " +
                         std::to_string(params.size()) + " parameters");
  if (state.first_moment.empty()) {
    for (const Tensor& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size())
    throw DimensionError("adam_step: optimizer state tracks a different parameter list");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (state.first_moment[i].size() != params[i].size())
      throw DimensionError("adam_step: accumulator " + std::to_string(i) + " shape mismatch");
    if (!grads[i].empty() && grads[i].size() != params[i].size())
      throw DimensionError("adam_step: gradient " + std::to_string(i) + " shape mismatch");
  }

  state.step += 1;
  const AdamOptions& o = state.options;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    const auto& g = grads[i];
    auto w = params[i].mutable_values();
    for (std::size_t j = 0; j < m.size(); ++j) {
      const double gj = g.empty() ? 0.0 : g[j];
      m[j] = o.beta1 * m[j] + (1.0 - o.beta1) * gj;
      v[j] = o.beta2 * v[j] + (1.0 - o.beta2) * gj * gj;
      w[j] -= o.learning_rate * (m[j] / correction1) / (std::sqrt(v[j] / correction2) + o.epsilon);
    }
  }
}

void adam_step(std::vector<Tensor>& params, OptimizerState& state) {
  std::vector<std::vector<double>> grads;
  grads.reserve(params.size());
  for (const Tensor& p : params) {
    if (p.has_grad())
      grads.emplace_back(p.grad().begin(), p.grad().end());
    else
      grads.emplace_back();
  }
  adam_step(params, state, grads);
}

}  // namespace visir::numerics
