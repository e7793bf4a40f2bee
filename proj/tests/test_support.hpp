// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "visir/image.hpp"
#include "visir/numerics/tensor.hpp"
#include "visir/random.hpp"

namespace visir::testing {

inline std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform();
  return v;
}

inline numerics::Tensor random_tensor(numerics::Shape shape, std::uint64_t seed, bool requires_grad = false,
                                      double lo = -1.0, double hi = 1.0) {
  const std::size_t n = numerics::element_count(shape);
  return numerics::Tensor::from(std::move(shape), random_values(n, seed, lo, hi), requires_grad);
}

inline Image random_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) {
  return Image(h, w, c, random_values(h * w * c, seed, 0.0, 1.0));
}

/// |a - n| / max(|a|, |n|, floor)
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheck {
  double worst = 0.0;  ///< worst element-wise relative error
  std::string where;
  std::size_t checked = 0;
  double worst_tensor = 0.0;  ///< worst ||analytic - numeric|| / max(||analytic||, ||numeric||) per leaf
  std::string where_tensor;
};

/// Compares reverse-mode gradients of `loss()` with central differences for
/// every element of every leaf. Leaves must require grad.
inline GradCheck check_gradients(std::vector<numerics::Tensor> leaves,
                                 const std::function<numerics::Tensor()>& loss, double h = 1e-4,
                                 const std::vector<std::string>& names = {}) {
  for (auto& t : leaves) t.zero_grad();
  numerics::backward(loss());
  std::vector<std::vector<double>> analytic;
  for (const auto& t : leaves) {
    if (t.has_grad())
      analytic.emplace_back(t.grad().begin(), t.grad().end());
    else
      analytic.emplace_back(t.size(), 0.0);
  }
  GradCheck out;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    auto values = leaves[i].mutable_values();
    double diff2 = 0.0, a2 = 0.0, n2 = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      values[j] = saved + h;
      const double up = loss().item();
      values[j] = saved - h;
      const double down = loss().item();
      values[j] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double err = relative_error(analytic[i][j], numeric);
      diff2 += (analytic[i][j] - numeric) * (analytic[i][j] - numeric);
      a2 += analytic[i][j] * analytic[i][j];
      n2 += numeric * numeric;
      ++out.checked;
      if (err > out.worst) {
        out.worst = err;
        out.where = (i < names.size() ? names[i] : "leaf " + std::to_string(i)) + "[" + std::to_string(j) + "]";
      }
    }
    const double tensor_err = std::sqrt(diff2) / std::max({std::sqrt(a2), std::sqrt(n2), 1e-6});
    if (tensor_err > out.worst_tensor) {
      out.worst_tensor = tensor_err;
      out.where_tensor = i < names.size() ? names[i] : "leaf " + std::to_string(i);
    }
  }
  return out;
}

}  // namespace visir::testing
