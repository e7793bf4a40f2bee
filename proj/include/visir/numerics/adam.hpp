// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "visir/numerics/tensor.hpp"

namespace visir::numerics {

struct AdamOptions {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators for one parameter list. Accumulator i always has the
/// size of parameter i; `step` counts completed updates.
struct OptimizerState {
  AdamOptions options;
  std::uint64_t step = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;

  explicit OptimizerState(AdamOptions opts = {}) : options(opts) {}
};

/// One bias-corrected Adam update of `params` in place, using `grads[i]` for
/// `params[i]`. An empty gradient span is treated as all zeros. Accumulators
/// are allocated on first use; a later shape change throws DimensionError.
void adam_step(std::vector<Tensor>& params, OptimizerState& state,
               const std::vector<std::vector<double>>& grads);

/// Convenience: uses each parameter's own accumulated gradient.
void adam_step(std::vector<Tensor>& params, OptimizerState& state);

}  // namespace visir::numerics
