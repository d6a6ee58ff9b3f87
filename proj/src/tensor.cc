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

#include "fullconv/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "fullconv/error.h"

namespace fullconv {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kData: return "data";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t extent : shape) n *= extent;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename Real>
Tensor<Real> Tensor<Real>::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), Real(0), requires_grad);
}

template <typename Real>
Tensor<Real> Tensor<Real>::full(Shape shape, Real value, bool requires_grad) {
  std::vector<Real> values(shape_numel(shape), value);
  return from_data(std::move(shape), std::move(values), requires_grad);
}

template <typename Real>
Tensor<Real> Tensor<Real>::from_data(Shape shape, std::vector<Real> values,
                                     bool requires_grad) {
  for (std::size_t extent : shape) {
    if (extent == 0) {
      fail(ErrorKind::kShape,
           "tensor extents must be positive, got " + shape_string(shape));
    }
  }
  if (shape_numel(shape) != values.size()) {
    fail(ErrorKind::kShape, "tensor of shape " + shape_string(shape) +
                                " needs " + std::to_string(shape_numel(shape)) +
                                " values, got " + std::to_string(values.size()));
  }
  auto node = std::make_shared<detail::Node<Real>>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

template <typename Real>
Tensor<Real> Tensor<Real>::scalar(Real value) {
  return from_data({}, {value});
}

template <typename Real>
Tensor<Real> Tensor<Real>::from_node(NodePtr node) {
  return Tensor(std::move(node));
}

template <typename Real>
const detail::Node<Real>& Tensor<Real>::checked() const {
  if (!node_) fail(ErrorKind::kInvalidArgument, "use of an undefined tensor");
  return *node_;
}

template <typename Real>
detail::Node<Real>& Tensor<Real>::checked() {
  if (!node_) fail(ErrorKind::kInvalidArgument, "use of an undefined tensor");
  return *node_;
}

template <typename Real>
const Shape& Tensor<Real>::shape() const {
  return checked().shape;
}

template <typename Real>
std::size_t Tensor<Real>::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    fail(ErrorKind::kShape, "axis " + std::to_string(axis) +
                                " out of range for shape " + shape_string(s));
  }
  return s[axis];
}

template <typename Real>
std::size_t Tensor<Real>::numel() const {
  return checked().value.size();
}

template <typename Real>
std::span<const Real> Tensor<Real>::data() const {
  return checked().value;
}

template <typename Real>
std::span<Real> Tensor<Real>::mutable_data() {
  auto& node = checked();
  if (node.backward) {
    fail(ErrorKind::kInvalidArgument, "cannot mutate the values of an op result");
  }
  return node.value;
}

template <typename Real>
bool Tensor<Real>::requires_grad() const {
  return checked().requires_grad;
}

template <typename Real>
void Tensor<Real>::set_requires_grad(bool flag) {
  auto& node = checked();
  if (node.backward) {
    fail(ErrorKind::kInvalidArgument, "requires_grad can only be set on leaves");
  }
  node.requires_grad = flag;
  if (!flag) node.grad.clear();
}

template <typename Real>
bool Tensor<Real>::is_leaf() const {
  return !checked().backward;
}

template <typename Real>
bool Tensor<Real>::has_grad() const {
  return !checked().grad.empty();
}

template <typename Real>
std::span<const Real> Tensor<Real>::grad() const {
  return checked().grad;
}

template <typename Real>
std::span<Real> Tensor<Real>::mutable_grad() {
  return checked().grad;
}

template <typename Real>
void Tensor<Real>::zero_grad() {
  auto& node = checked();
  std::fill(node.grad.begin(), node.grad.end(), Real(0));
}

template <typename Real>
Real Tensor<Real>::item() const {
  const auto& node = checked();
  if (node.value.size() != 1) {
    fail(ErrorKind::kShape,
         "item() needs a single element, shape is " + shape_string(node.shape));
  }
  return node.value[0];
}

template <typename Real>
Real Tensor<Real>::at(std::size_t row, std::size_t col) const {
  const auto& node = checked();
  if (node.shape.size() != 2 || row >= node.shape[0] || col >= node.shape[1]) {
    fail(ErrorKind::kShape, "at(" + std::to_string(row) + "," +
                                std::to_string(col) + ") invalid for shape " +
                                shape_string(node.shape));
  }
  return node.value[row * node.shape[1] + col];
}

template <typename Real>
Tensor<Real> Tensor<Real>::detach() const {
  const auto& node = checked();
  return from_data(node.shape, node.value);
}

template <typename Real>
void Tensor<Real>::backward() const {
  const auto& root_node = checked();
  if (root_node.value.size() != 1) {
    fail(ErrorKind::kShape, "backward() needs a scalar loss, shape is " +
                                shape_string(root_node.shape));
  }
  if (!root_node.requires_grad) {
    fail(ErrorKind::kInvalidArgument,
         "backward() on a tensor that does not require grad");
  }

  // Iterative post-order DFS; `order` ends up topologically sorted.
  std::vector<detail::Node<Real>*> order;
  std::unordered_set<detail::Node<Real>*> visited;
  std::vector<std::pair<detail::Node<Real>*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node<Real>* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (auto* node : order) {
    if (node->backward) {
      node->grad.assign(node->value.size(), Real(0));
    } else if (node->grad.size() != node->value.size()) {
      node->grad.assign(node->value.size(), Real(0));
    }
  }
  node_->grad[0] += Real(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
  for (auto* node : order) {
    if (node->backward) continue;
    for (Real g : node->grad) {
      if (!std::isfinite(g)) {
        fail(ErrorKind::kNumeric, "non-finite gradient on a tensor of shape " +
                                      shape_string(node->shape));
      }
    }
  }
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace fullconv
