// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "visir/numerics/tensor.hpp"

namespace visir::numerics {

/// Standard matrix product of a [m x k] and b [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

/// x [n x in] times weight^T ([out x in]) plus bias [out] broadcast over rows.
/// `bias` may be undefined.
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor transpose(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);
/// x [n x d] + row [d] broadcast over rows.
Tensor add_row(const Tensor& x, const Tensor& row);

/// Elementwise sin(omega0 * x).
Tensor sine_activation(const Tensor& x, double omega0);
/// Gaussian error linear unit, exact (erf) form.
Tensor gelu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

/// Softmax along `axis`; the tensor is viewed as [outer, shape[axis], inner].
Tensor softmax(const Tensor& x, std::size_t axis);

/// Normalise every row over the last axis, then apply gain and shift
/// (both of length equal to the last extent).
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps = 1e-5);

/// out[i] = x[index[i]]; the backward pass scatter-adds.
Tensor gather(const Tensor& x, std::vector<std::size_t> index, Shape out_shape);
/// Columns [begin, begin + count) of a matrix.
Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count);
/// Concatenate matrices with equal row counts side by side.
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor reshape(const Tensor& x, Shape shape);

/// Mean over rows: [n x d] -> [1 x d].
Tensor mean_rows(const Tensor& x);
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Mean squared difference against a constant target of the same size.
Tensor mse_loss(const Tensor& prediction, const Tensor& target);

}  // namespace visir::numerics
