// SPDX-License-Identifier: Apache-2.0

// Dense row-major tensors with define-by-run reverse-mode differentiation.
//
// A Tensor is a cheap handle to a node. Every op that has an input with
// requires_grad set records its inputs and a local backward rule on the
// output node; `backward(loss)` orders the reachable nodes topologically
// (the tape), runs the rules in reverse, and then drops the recorded
// history so the next forward pass builds a fresh tape.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace visir::numerics {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a gradient arrives
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;  // reads this->grad, accumulates into inputs

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;

  /// Throws DimensionError if the value count disagrees with the shape and
  /// NonFiniteError if any value is NaN or infinite.
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  /// Extent of a 2-D tensor; rank-1 tensors are treated as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  /// Direct write access for parameter initialisation and optimizer updates.
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return values()[i]; }

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();

  /// Same values, no history, no gradient.
  Tensor detach() const;
  /// Deep copy of values keeping the requires_grad flag, without history.
  Tensor clone() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

  /// Build an op output. `inputs` are recorded only if one of them requires
  /// gradients; `rule` then receives the output node during the reverse sweep.
  static Tensor make_result(Shape shape, std::vector<double> values,
                            std::initializer_list<const Tensor*> inputs,
                            std::function<void(detail::Node&)> rule);
  static Tensor make_result(Shape shape, std::vector<double> values,
                            const std::vector<Tensor>& inputs,
                            std::function<void(detail::Node&)> rule);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

/// Reverse sweep from a scalar loss. Populates grad on every requires_grad
/// leaf reachable from `loss` (accumulating into existing grads) and clears
/// the recorded history. Throws ContractError for a non-scalar loss.
void backward(const Tensor& loss);

}  // namespace visir::numerics
