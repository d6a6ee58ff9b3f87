// Copyright (c) 2026 The FullConv TTS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fullconv {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

namespace detail {

// One vertex of the autodiff graph. `backward` reads `grad` of this node and
// accumulates into the grads of `parents`; leaves have no backward function.
template <typename Real>
struct Node {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;
};

}  // namespace detail

/// True unless a NoGradGuard is alive on the current thread.
bool grad_enabled();

/// Disables graph recording on the current thread for the guard's lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Dense row-major tensor with optional reverse-mode gradient.
///
/// A Tensor is a handle: copies share storage and graph position. Values of
/// an op result are never modified after creation; only leaves (parameters)
/// are updated in place, by the optimizer.
template <typename Real>
class Tensor {
 public:
  using NodePtr = std::shared_ptr<detail::Node<Real>>;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Real value, bool requires_grad = false);
  static Tensor from_data(Shape shape, std::vector<Real> values,
                          bool requires_grad = false);
  static Tensor scalar(Real value);
  static Tensor from_node(NodePtr node);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const Real> data() const;
  /// Writable view of a leaf's values. Throws for op results.
  std::span<Real> mutable_data();

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool is_leaf() const;
  bool has_grad() const;
  /// Empty span until a backward pass has reached this tensor.
  std::span<const Real> grad() const;
  std::span<Real> mutable_grad();
  void zero_grad();

  Real item() const;
  /// Element read for rank-2 tensors.
  Real at(std::size_t row, std::size_t col) const;

  /// Copy of the values with no graph history.
  Tensor detach() const;

  /// Populates grads of every requires_grad tensor reachable from this
  /// scalar. Leaf grads accumulate across calls until zero_grad().
  void backward() const;

  const NodePtr& node() const { return node_; }

 private:
  explicit Tensor(NodePtr node) : node_(std::move(node)) {}
  const detail::Node<Real>& checked() const;
  detail::Node<Real>& checked();

  NodePtr node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace fullconv
