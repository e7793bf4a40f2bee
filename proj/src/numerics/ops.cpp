// SPDX-License-Identifier: Apache-2.0

#include "visir/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "visir/errors.hpp"
#include "visir/numerics/kernels.hpp"

namespace visir::numerics {

namespace {

using detail::Node;

// Gradient buffer of input `i`, or nullptr when that input takes no gradient.
double* grad_of(Node& self, std::size_t i) {
  Node& in = *self.inputs[i];
  if (!in.requires_grad) return nullptr;
  return in.ensure_grad().data();
}

const std::vector<double>& value_of(const Node& self, std::size_t i) { return self.inputs[i]->value; }

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2 && t.rank() != 1)
    throw DimensionError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

void require_same_size(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw DimensionError(std::string(op) + ": shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " differ");
}

template <class F, class D>
Tensor unary(const Tensor& x, F&& f, D&& dfdx) {
  std::vector<double> out(x.size());
  const auto in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return Tensor::make_result(x.shape(), std::move(out), {&x}, [dfdx](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& xv = value_of(self, 0);
    for (std::size_t i = 0; i < xv.size(); ++i) gx[i] += self.grad[i] * dfdx(xv[i], self.value[i]);
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k)
    throw DimensionError("matmul: inner extents differ (" + shape_string(a.shape()) + " x " +
                         shape_string(b.shape()) + ")");
  std::vector<double> out(m * n, 0.0);
  kernels::gemm_nn({a.values().data(), m, k}, {b.values().data(), k, n}, out.data());
  return Tensor::make_result({m, n}, std::move(out), {&a, &b}, [m, k, n](Node& self) {
    const double* g = self.grad.data();
    if (double* ga = grad_of(self, 0))
      kernels::gemm_nt({g, m, n}, {value_of(self, 1).data(), k, n}, ga);
    if (double* gb = grad_of(self, 1))
      kernels::gemm_tn({value_of(self, 0).data(), m, k}, {g, m, n}, gb);
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_matrix(x, "linear");
  if (weight.rank() != 2) throw DimensionError("linear: weight must be a matrix");
  const std::size_t n = x.rows(), in = x.cols(), out_dim = weight.rows();
  if (weight.cols() != in)
    throw DimensionError("linear: input width " + std::to_string(in) + " does not match weight " +
                         shape_string(weight.shape()));
  const bool has_bias = bias.defined();
  if (has_bias && bias.size() != out_dim)
    throw DimensionError("linear: bias length " + std::to_string(bias.size()) + " != " +
                         std::to_string(out_dim));
  std::vector<double> out(n * out_dim, 0.0);
  if (has_bias) {
    const auto b = bias.values();
    for (std::size_t r = 0; r < n; ++r) std::copy(b.begin(), b.end(), out.begin() + r * out_dim);
  }
  kernels::gemm_nt({x.values().data(), n, in}, {weight.values().data(), out_dim, in}, out.data());

  auto rule = [n, in, out_dim, has_bias](Node& self) {
    const double* g = self.grad.data();
    if (double* gx = grad_of(self, 0))
      kernels::gemm_nn({g, n, out_dim}, {value_of(self, 1).data(), out_dim, in}, gx);
    if (double* gw = grad_of(self, 1))
      kernels::gemm_tn({g, n, out_dim}, {value_of(self, 0).data(), n, in}, gw);
    if (has_bias) {
      if (double* gb = grad_of(self, 2))
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t j = 0; j < out_dim; ++j) gb[j] += g[r * out_dim + j];
    }
  };
  if (has_bias) return Tensor::make_result({n, out_dim}, std::move(out), {&x, &weight, &bias}, rule);
  return Tensor::make_result({n, out_dim}, std::move(out), {&x, &weight}, rule);
}

Tensor transpose(const Tensor& x) {
  require_matrix(x, "transpose");
  const std::size_t r = x.rows(), c = x.cols();
  std::vector<double> out(r * c);
  const auto v = x.values();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = v[i * c + j];
  return Tensor::make_result({c, r}, std::move(out), {&x}, [r, c](Node& self) {
    if (double* gx = grad_of(self, 0))
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) gx[i * c + j] += self.grad[j * r + i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_size(a, b, "add");
  std::vector<double> out(a.size());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k)
      if (double* g = grad_of(self, k))
        for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_size(a, b, "sub");
  std::vector<double> out(a.size());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    if (double* g = grad_of(self, 1))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_size(a, b, "mul");
  std::vector<double> out(a.size());
  const auto av = a.values(), bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    const auto& av = value_of(self, 0);
    const auto& bv = value_of(self, 1);
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
    if (double* g = grad_of(self, 1))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary(
      x, [factor](double v) { return factor * v; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double offset) {
  return unary(
      x, [offset](double v) { return v + offset; }, [](double, double) { return 1.0; });
}

Tensor add_row(const Tensor& x, const Tensor& row) {
  require_matrix(x, "add_row");
  const std::size_t n = x.rows(), d = x.cols();
  if (row.size() != d)
    throw DimensionError("add_row: row length " + std::to_string(row.size()) + " != " + std::to_string(d));
  std::vector<double> out(x.values().begin(), x.values().end());
  const auto rv = row.values();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] += rv[j];
  return Tensor::make_result(x.shape(), std::move(out), {&x, &row}, [n, d](Node& self) {
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    if (double* g = grad_of(self, 1))
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) g[j] += self.grad[i * d + j];
  });
}

Tensor sine_activation(const Tensor& x, double omega0) {
  return unary(
      x, [omega0](double v) { return std::sin(omega0 * v); },
      [omega0](double v, double) { return omega0 * std::cos(omega0 * v); });
}

Tensor gelu(const Tensor& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return unary(
      x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
        return cdf + v * pdf;
      });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  const Shape& s = x.shape();
  if (axis >= s.size()) throw DimensionError("softmax: axis out of range for " + shape_string(s));
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];
  const auto v = x.values();
  std::vector<double> out(v.size());
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      double mx = v[base];
      for (std::size_t j = 1; j < len; ++j) mx = std::max(mx, v[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const double e = std::exp(v[base + j * inner] - mx);
        out[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
    }
  }
  return Tensor::make_result(s, std::move(out), {&x}, [outer, inner, len](Node& self) {
    double* gx = grad_of(self, 0);
    if (!gx) return;
    const auto& y = self.value;
    const auto& g = self.grad;
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t in = 0; in < inner; ++in) {
        const std::size_t base = o * len * inner + in;
        double dot = 0.0;
        for (std::size_t j = 0; j < len; ++j) dot += g[base + j * inner] * y[base + j * inner];
        for (std::size_t j = 0; j < len; ++j) {
          const std::size_t idx = base + j * inner;
          gx[idx] += y[idx] * (g[idx] - dot);
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& shift, double eps) {
  const std::size_t d = x.shape().back();
  const std::size_t n = x.size() / d;
  if (gain.size() != d || shift.size() != d)
    throw DimensionError("layer_norm: gain/shift must have length " + std::to_string(d));
  const auto v = x.values();
  const auto gv = gain.values();
  const auto sv = shift.values();
  std::vector<double> out(v.size());
  std::vector<double> normed(v.size());
  std::vector<double> inv_std(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = v.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = is;
    for (std::size_t j = 0; j < d; ++j) {
      const double xh = (row[j] - mu) * is;
      normed[r * d + j] = xh;
      out[r * d + j] = xh * gv[j] + sv[j];
    }
  }
  return Tensor::make_result(
      x.shape(), std::move(out), {&x, &gain, &shift},
      [n, d, normed = std::move(normed), inv_std = std::move(inv_std)](Node& self) {
        const auto& g = self.grad;
        const auto& gain_v = value_of(self, 1);
        if (double* gx = grad_of(self, 0)) {
          const double inv_d = 1.0 / static_cast<double>(d);
          for (std::size_t r = 0; r < n; ++r) {
            double sum_dxh = 0.0, sum_dxh_xh = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double dxh = g[r * d + j] * gain_v[j];
              sum_dxh += dxh;
              sum_dxh_xh += dxh * normed[r * d + j];
            }
            for (std::size_t j = 0; j < d; ++j) {
              const double dxh = g[r * d + j] * gain_v[j];
              gx[r * d + j] +=
                  inv_std[r] * (dxh - inv_d * sum_dxh - normed[r * d + j] * inv_d * sum_dxh_xh);
            }
          }
        }
        if (double* gg = grad_of(self, 1))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < d; ++j) gg[j] += g[r * d + j] * normed[r * d + j];
        if (double* gs = grad_of(self, 2))
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < d; ++j) gs[j] += g[r * d + j];
      });
}

Tensor gather(const Tensor& x, std::vector<std::size_t> index, Shape out_shape) {
  if (element_count(out_shape) != index.size())
    throw DimensionError("gather: index count does not match " + shape_string(out_shape));
  const auto v = x.values();
  std::vector<double> out(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= v.size()) throw DimensionError("gather: index out of range");
    out[i] = v[index[i]];
  }
  return Tensor::make_result(std::move(out_shape), std::move(out), {&x},
                             [index = std::move(index)](Node& self) {
                               if (double* gx = grad_of(self, 0))
                                 for (std::size_t i = 0; i < index.size(); ++i) gx[index[i]] += self.grad[i];
                             });
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
  require_matrix(x, "slice_cols");
  const std::size_t r = x.rows(), c = x.cols();
  if (begin + count > c || count == 0) throw DimensionError("slice_cols: range out of bounds");
  std::vector<std::size_t> index;
  index.reserve(r * count);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < count; ++j) index.push_back(i * c + begin + j);
  return gather(x, std::move(index), {r, count});
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw DimensionError("concat_cols: nothing to concatenate");
  const std::size_t r = parts.front().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    if (p.rows() != r) throw DimensionError("concat_cols: row counts differ");
    widths.push_back(p.cols());
    total += p.cols();
  }
  std::vector<double> out(r * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].values();
    for (std::size_t i = 0; i < r; ++i)
      std::copy_n(v.begin() + i * widths[k], widths[k], out.begin() + i * total + offset);
    offset += widths[k];
  }
  return Tensor::make_result({r, total}, std::move(out), parts, [r, total, widths](Node& self) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < widths.size(); ++k) {
      if (double* g = grad_of(self, k))
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < widths[k]; ++j) g[i * widths[k] + j] += self.grad[i * total + offset + j];
      offset += widths[k];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (element_count(shape) != x.size())
    throw DimensionError("reshape: " + shape_string(x.shape()) + " -> " + shape_string(shape));
  std::vector<double> out(x.values().begin(), x.values().end());
  return Tensor::make_result(std::move(shape), std::move(out), {&x}, [](Node& self) {
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor mean_rows(const Tensor& x) {
  require_matrix(x, "mean_rows");
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) throw DimensionError("mean_rows: empty");
  const auto v = x.values();
  std::vector<double> out(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) out[j] += v[i * d + j];
  for (double& o : out) o /= static_cast<double>(n);
  return Tensor::make_result({1, d}, std::move(out), {&x}, [n, d](Node& self) {
    if (double* g = grad_of(self, 0)) {
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) g[i * d + j] += self.grad[j] * inv;
    }
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return Tensor::make_result({1}, {total}, {&x}, [](Node& self) {
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < self.inputs[0]->value.size(); ++i) g[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.size())); }

Tensor mse_loss(const Tensor& prediction, const Tensor& target) {
  if (prediction.size() != target.size())
    throw DimensionError("mse_loss: " + shape_string(prediction.shape()) + " vs " +
                         shape_string(target.shape()));
  const double n = static_cast<double>(prediction.size());
  const double total = kernels::sum_squared_diff(prediction.values(), target.values());
  return Tensor::make_result({1}, {total / n}, {&prediction, &target}, [n](Node& self) {
    const auto& p = value_of(self, 0);
    const auto& t = value_of(self, 1);
    const double s = 2.0 * self.grad[0] / n;
    if (double* g = grad_of(self, 0))
      for (std::size_t i = 0; i < p.size(); ++i) g[i] += s * (p[i] - t[i]);
    if (double* g = grad_of(self, 1))
      for (std::size_t i = 0; i < p.size(); ++i) g[i] -= s * (p[i] - t[i]);
  });
}

}  // namespace visir::numerics
