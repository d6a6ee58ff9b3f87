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

#include "fullconv/ops.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "fullconv/error.h"

namespace fullconv {

template <typename Real>
void ensure_finite(std::span<const Real> values, const char* what) {
  for (Real v : values) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kNumeric, std::string(what) + " produced a non-finite value");
    }
  }
}

namespace {

template <typename Real>
using Node = detail::Node<Real>;

template <typename Real>
Tensor<Real> make_result(Shape shape, std::vector<Real> value,
                         std::initializer_list<const Tensor<Real>*> inputs,
                         const char* what,
                         std::function<void(Node<Real>&)> backward) {
  ensure_finite<Real>(value, what);
  auto node = std::make_shared<Node<Real>>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  bool needs_grad = false;
  if (grad_enabled()) {
    for (const auto* input : inputs) needs_grad |= input->requires_grad();
  }
  if (needs_grad) {
    node->requires_grad = true;
    for (const auto* input : inputs) node->parents.push_back(input->node());
    node->backward = std::move(backward);
  }
  return Tensor<Real>::from_node(std::move(node));
}

template <typename Real>
void require_same_shape(const Tensor<Real>& a, const Tensor<Real>& b, const char* op) {
  if (a.shape() != b.shape()) {
    fail(ErrorKind::kShape, std::string(op) + ": shape " + shape_string(a.shape()) +
                                " does not match " + shape_string(b.shape()));
  }
}

template <typename Real>
void require_rank(const Tensor<Real>& x, std::size_t rank, const char* op,
                  const char* operand) {
  if (x.rank() != rank) {
    fail(ErrorKind::kShape, std::string(op) + ": " + operand + " must be rank " +
                                std::to_string(rank) + ", got shape " +
                                shape_string(x.shape()));
  }
}

[[noreturn]] void dim_mismatch(const char* op, const std::string& what,
                               std::size_t got, std::size_t expected) {
  fail(ErrorKind::kShape, std::string(op) + ": " + what + " is " + std::to_string(got) +
                              ", expected " + std::to_string(expected));
}

template <typename Real, typename Forward, typename Derivative>
Tensor<Real> unary(const Tensor<Real>& x, const char* what, Forward forward,
                   Derivative derivative) {
  auto in = x.data();
  std::vector<Real> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = forward(in[i]);
  return make_result<Real>(
      x.shape(), std::move(out), {&x}, what, [derivative](Node<Real>& self) {
        auto& p = *self.parents[0];
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          p.grad[i] += self.grad[i] * derivative(p.value[i], self.value[i]);
        }
      });
}

}  // namespace

template <typename Real>
Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_same_shape(a, b, "add");
  auto x = a.data();
  auto y = b.data();
  std::vector<Real> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return make_result<Real>(a.shape(), std::move(out), {&a, &b}, "add",
                           [](Node<Real>& self) {
                             for (auto& p : self.parents) {
                               if (!p->requires_grad) continue;
                               for (std::size_t i = 0; i < self.grad.size(); ++i) {
                                 p->grad[i] += self.grad[i];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_same_shape(a, b, "sub");
  auto x = a.data();
  auto y = b.data();
  std::vector<Real> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return make_result<Real>(a.shape(), std::move(out), {&a, &b}, "sub",
                           [](Node<Real>& self) {
                             auto& pa = *self.parents[0];
                             auto& pb = *self.parents[1];
                             for (std::size_t i = 0; i < self.grad.size(); ++i) {
                               if (pa.requires_grad) pa.grad[i] += self.grad[i];
                               if (pb.requires_grad) pb.grad[i] -= self.grad[i];
                             }
                           });
}

template <typename Real>
Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_same_shape(a, b, "mul");
  auto x = a.data();
  auto y = b.data();
  std::vector<Real> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * y[i];
  return make_result<Real>(a.shape(), std::move(out), {&a, &b}, "mul",
                           [](Node<Real>& self) {
                             auto& pa = *self.parents[0];
                             auto& pb = *self.parents[1];
                             for (std::size_t i = 0; i < self.grad.size(); ++i) {
                               if (pa.requires_grad) pa.grad[i] += self.grad[i] * pb.value[i];
                               if (pb.requires_grad) pb.grad[i] += self.grad[i] * pa.value[i];
                             }
                           });
}

template <typename Real>
Tensor<Real> scale(const Tensor<Real>& a, Real factor) {
  return unary(a, "scale", [factor](Real v) { return v * factor; },
               [factor](Real, Real) { return factor; });
}

template <typename Real>
Tensor<Real> add_scalar(const Tensor<Real>& a, Real offset) {
  return unary(a, "add_scalar", [offset](Real v) { return v + offset; },
               [](Real, Real) { return Real(1); });
}

template <typename Real>
Tensor<Real> sigmoid(const Tensor<Real>& x) {
  return unary(
      x, "sigmoid",
      [](Real v) {
        if (v >= 0) return Real(1) / (Real(1) + std::exp(-v));
        Real e = std::exp(v);
        return e / (Real(1) + e);
      },
      [](Real, Real y) { return y * (Real(1) - y); });
}

template <typename Real>
Tensor<Real> relu(const Tensor<Real>& x) {
  return unary(x, "relu", [](Real v) { return v > 0 ? v : Real(0); },
               [](Real v, Real) { return v > 0 ? Real(1) : Real(0); });
}

template <typename Real>
Tensor<Real> softplus(const Tensor<Real>& x) {
  return unary(
      x, "softplus",
      [](Real v) { return std::max(v, Real(0)) + std::log1p(std::exp(-std::abs(v))); },
      [](Real v, Real) {
        if (v >= 0) return Real(1) / (Real(1) + std::exp(-v));
        Real e = std::exp(v);
        return e / (Real(1) + e);
      });
}

template <typename Real>
Tensor<Real> absolute(const Tensor<Real>& x) {
  return unary(x, "abs", [](Real v) { return std::abs(v); },
               [](Real v, Real) {
                 return v > 0 ? Real(1) : (v < 0 ? Real(-1) : Real(0));
               });
}

template <typename Real>
Tensor<Real> sum(const Tensor<Real>& x) {
  Real total = 0;
  for (Real v : x.data()) total += v;
  return make_result<Real>({}, {total}, {&x}, "sum", [](Node<Real>& self) {
    auto& p = *self.parents[0];
    for (auto& g : p.grad) g += self.grad[0];
  });
}

template <typename Real>
Tensor<Real> mean(const Tensor<Real>& x) {
  return scale(sum(x), Real(1) / static_cast<Real>(x.numel()));
}

template <typename Real>
Tensor<Real> weighted_sum(const Tensor<Real>& x, const Tensor<Real>& weights) {
  require_same_shape(x, weights, "weighted_sum");
  auto v = x.data();
  auto w = weights.data();
  Real total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) total += v[i] * w[i];
  Tensor<Real> constant = weights.detach();
  return make_result<Real>({}, {total}, {&x}, "weighted_sum",
                           [constant](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             auto w = constant.data();
                             for (std::size_t i = 0; i < p.grad.size(); ++i) {
                               p.grad[i] += self.grad[0] * w[i];
                             }
                           });
}

template <typename Real>
Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_rank(a, 2, "matmul", "left operand");
  require_rank(b, 2, "matmul", "right operand");
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k) dim_mismatch("matmul", "right operand rows (dim 0)", b.dim(0), k);
  auto x = a.data();
  auto y = b.data();
  std::vector<Real> out(m * n, Real(0));
  for (std::size_t i = 0; i < m; ++i) {
    Real* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Real s = x[i * k + p];
      const Real* brow = y.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
  return make_result<Real>({m, n}, std::move(out), {&a, &b}, "matmul",
                           [m, k, n](Node<Real>& self) {
                             auto& pa = *self.parents[0];
                             auto& pb = *self.parents[1];
                             const Real* g = self.grad.data();
                             for (std::size_t i = 0; i < m; ++i) {
                               for (std::size_t p = 0; p < k; ++p) {
                                 const Real* brow = pb.value.data() + p * n;
                                 const Real* grow = g + i * n;
                                 if (pa.requires_grad) {
                                   Real acc = 0;
                                   for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                                   pa.grad[i * k + p] += acc;
                                 }
                                 if (pb.requires_grad) {
                                   const Real s = pa.value[i * k + p];
                                   Real* dbrow = pb.grad.data() + p * n;
                                   for (std::size_t j = 0; j < n; ++j) dbrow[j] += s * grow[j];
                                 }
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> transpose(const Tensor<Real>& x) {
  require_rank(x, 2, "transpose", "input");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  auto in = x.data();
  std::vector<Real> out(in.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = in[r * cols + c];
  }
  return make_result<Real>({cols, rows}, std::move(out), {&x}, "transpose",
                           [rows, cols](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t c = 0; c < cols; ++c) {
                                 p.grad[r * cols + c] += self.grad[c * rows + r];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> softmax_columns(const Tensor<Real>& x, std::size_t valid_rows) {
  require_rank(x, 2, "softmax_columns", "input");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  if (valid_rows == 0) valid_rows = rows;
  if (valid_rows > rows) dim_mismatch("softmax_columns", "valid rows", valid_rows, rows);
  auto in = x.data();
  ensure_finite(in, "softmax_columns input");
  std::vector<Real> out(in.size(), Real(0));
  for (std::size_t c = 0; c < cols; ++c) {
    Real peak = in[c];
    for (std::size_t r = 1; r < valid_rows; ++r) peak = std::max(peak, in[r * cols + c]);
    Real total = 0;
    for (std::size_t r = 0; r < valid_rows; ++r) {
      const Real e = std::exp(in[r * cols + c] - peak);
      out[r * cols + c] = e;
      total += e;
    }
    for (std::size_t r = 0; r < valid_rows; ++r) out[r * cols + c] /= total;
  }
  return make_result<Real>({rows, cols}, std::move(out), {&x}, "softmax_columns",
                           [valid_rows, cols](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t c = 0; c < cols; ++c) {
                               Real dot = 0;
                               for (std::size_t r = 0; r < valid_rows; ++r) {
                                 dot += self.value[r * cols + c] * self.grad[r * cols + c];
                               }
                               for (std::size_t r = 0; r < valid_rows; ++r) {
                                 const std::size_t i = r * cols + c;
                                 p.grad[i] += self.value[i] * (self.grad[i] - dot);
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> concat_channels(const Tensor<Real>& a, const Tensor<Real>& b) {
  require_rank(a, 2, "concat_channels", "first operand");
  require_rank(b, 2, "concat_channels", "second operand");
  if (a.dim(1) != b.dim(1)) {
    dim_mismatch("concat_channels", "second operand length (dim 1)", b.dim(1), a.dim(1));
  }
  const std::size_t split = a.numel();
  std::vector<Real> out;
  out.reserve(a.numel() + b.numel());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  return make_result<Real>({a.dim(0) + b.dim(0), a.dim(1)}, std::move(out), {&a, &b},
                           "concat_channels", [split](Node<Real>& self) {
                             auto& pa = *self.parents[0];
                             auto& pb = *self.parents[1];
                             if (pa.requires_grad) {
                               for (std::size_t i = 0; i < split; ++i) pa.grad[i] += self.grad[i];
                             }
                             if (pb.requires_grad) {
                               for (std::size_t i = split; i < self.grad.size(); ++i) {
                                 pb.grad[i - split] += self.grad[i];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> slice_rows(const Tensor<Real>& x, std::size_t begin, std::size_t count) {
  require_rank(x, 2, "slice_rows", "input");
  if (count == 0 || begin + count > x.dim(0)) {
    dim_mismatch("slice_rows", "end row", begin + count, x.dim(0));
  }
  const std::size_t cols = x.dim(1);
  auto in = x.data();
  std::vector<Real> out(in.begin() + begin * cols, in.begin() + (begin + count) * cols);
  return make_result<Real>({count, cols}, std::move(out), {&x}, "slice_rows",
                           [offset = begin * cols](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t i = 0; i < self.grad.size(); ++i) {
                               p.grad[offset + i] += self.grad[i];
                             }
                           });
}

template <typename Real>
Tensor<Real> slice_columns(const Tensor<Real>& x, std::size_t begin, std::size_t count) {
  require_rank(x, 2, "slice_columns", "input");
  if (count == 0 || begin + count > x.dim(1)) {
    dim_mismatch("slice_columns", "end column", begin + count, x.dim(1));
  }
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  auto in = x.data();
  std::vector<Real> out(rows * count);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(in.begin() + r * cols + begin, count, out.begin() + r * count);
  }
  return make_result<Real>({rows, count}, std::move(out), {&x}, "slice_columns",
                           [rows, cols, begin, count](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t c = 0; c < count; ++c) {
                                 p.grad[r * cols + begin + c] += self.grad[r * count + c];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> shift_right(const Tensor<Real>& x) {
  require_rank(x, 2, "shift_right", "input");
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  auto in = x.data();
  std::vector<Real> out(in.size(), Real(0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 1; c < cols; ++c) out[r * cols + c] = in[r * cols + c - 1];
  }
  return make_result<Real>(x.shape(), std::move(out), {&x}, "shift_right",
                           [rows, cols](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t r = 0; r < rows; ++r) {
                               for (std::size_t c = 1; c < cols; ++c) {
                                 p.grad[r * cols + c - 1] += self.grad[r * cols + c];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> embedding(const Tensor<Real>& table, std::span<const std::int32_t> ids) {
  require_rank(table, 2, "embedding", "table");
  if (ids.empty()) fail(ErrorKind::kShape, "embedding: empty id sequence");
  const std::size_t vocab = table.dim(0), width = table.dim(1), n = ids.size();
  std::vector<std::int32_t> index(ids.begin(), ids.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (index[j] < 0 || static_cast<std::size_t>(index[j]) >= vocab) {
      fail(ErrorKind::kInvalidArgument, "embedding: id " + std::to_string(index[j]) +
                                            " at position " + std::to_string(j) +
                                            " outside vocabulary of " + std::to_string(vocab));
    }
  }
  auto w = table.data();
  std::vector<Real> out(width * n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t row = static_cast<std::size_t>(index[j]) * width;
    for (std::size_t c = 0; c < width; ++c) out[c * n + j] = w[row + c];
  }
  return make_result<Real>({width, n}, std::move(out), {&table}, "embedding",
                           [index = std::move(index), width, n](Node<Real>& self) {
                             auto& p = *self.parents[0];
                             for (std::size_t j = 0; j < n; ++j) {
                               const std::size_t row = static_cast<std::size_t>(index[j]) * width;
                               for (std::size_t c = 0; c < width; ++c) {
                                 p.grad[row + c] += self.grad[c * n + j];
                               }
                             }
                           });
}

template <typename Real>
Tensor<Real> conv1d(const Tensor<Real>& x, const ConvLayerSpec& spec,
                    const Tensor<Real>& weights, const Tensor<Real>& bias) {
  require_rank(x, 2, "conv1d", "input");
  require_rank(weights, 3, "conv1d", "weights");
  require_rank(bias, 1, "conv1d", "bias");
  const std::size_t cin = spec.in_channels, cout = spec.out_channels;
  const std::size_t kernel = spec.kernel_size, dilation = spec.dilation;
  if (kernel == 0 || dilation == 0) {
    fail(ErrorKind::kInvalidArgument, "conv1d: kernel size and dilation must be positive");
  }
  if (!spec.causal && kernel % 2 == 0) {
    fail(ErrorKind::kInvalidArgument, "conv1d: non-causal convolution needs an odd kernel, got " +
                                          std::to_string(kernel));
  }
  if (x.dim(0) != cin) dim_mismatch("conv1d", "input channels (dim 0)", x.dim(0), cin);
  if (weights.dim(0) != cout) dim_mismatch("conv1d", "weight out-channels (dim 0)", weights.dim(0), cout);
  if (weights.dim(1) != cin) dim_mismatch("conv1d", "weight in-channels (dim 1)", weights.dim(1), cin);
  if (weights.dim(2) != kernel) dim_mismatch("conv1d", "weight kernel (dim 2)", weights.dim(2), kernel);
  if (bias.dim(0) != cout) dim_mismatch("conv1d", "bias length (dim 0)", bias.dim(0), cout);

  const std::size_t length = x.dim(1);
  const std::ptrdiff_t anchor =
      static_cast<std::ptrdiff_t>(spec.causal ? kernel - 1 : (kernel - 1) / 2);
  const std::ptrdiff_t T = static_cast<std::ptrdiff_t>(length);
  // Valid output range [lo, hi) for tap k so that t + offset stays in [0, T).
  auto tap_range = [=](std::size_t k) {
    const std::ptrdiff_t offset =
        (static_cast<std::ptrdiff_t>(k) - anchor) * static_cast<std::ptrdiff_t>(dilation);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -offset);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(T, T - offset);
    return std::make_tuple(offset, lo, hi);
  };

  auto in = x.data();
  auto w = weights.data();
  auto b = bias.data();
  std::vector<Real> out(cout * length);
  for (std::size_t c = 0; c < cout; ++c) {
    Real* y = out.data() + c * length;
    std::fill(y, y + length, b[c]);
    for (std::size_t i = 0; i < cin; ++i) {
      const Real* xi = in.data() + i * length;
      for (std::size_t k = 0; k < kernel; ++k) {
        const Real wk = w[(c * cin + i) * kernel + k];
        auto [offset, lo, hi] = tap_range(k);
        for (std::ptrdiff_t t = lo; t < hi; ++t) y[t] += wk * xi[t + offset];
      }
    }
  }
  return make_result<Real>(
      {cout, length}, std::move(out), {&x, &weights, &bias}, "conv1d",
      [=](Node<Real>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        for (std::size_t c = 0; c < cout; ++c) {
          const Real* gy = self.grad.data() + c * length;
          if (pb.requires_grad) {
            Real acc = 0;
            for (std::size_t t = 0; t < length; ++t) acc += gy[t];
            pb.grad[c] += acc;
          }
          for (std::size_t i = 0; i < cin; ++i) {
            const Real* xi = px.value.data() + i * length;
            for (std::size_t k = 0; k < kernel; ++k) {
              const std::size_t wi = (c * cin + i) * kernel + k;
              auto [offset, lo, hi] = tap_range(k);
              if (pw.requires_grad) {
                Real acc = 0;
                for (std::ptrdiff_t t = lo; t < hi; ++t) acc += gy[t] * xi[t + offset];
                pw.grad[wi] += acc;
              }
              if (px.requires_grad) {
                const Real wk = pw.value[wi];
                Real* gx = px.grad.data() + i * length;
                for (std::ptrdiff_t t = lo; t < hi; ++t) gx[t + offset] += wk * gy[t];
              }
            }
          }
        }
      });
}

template <typename Real>
Tensor<Real> conv1d_transposed(const Tensor<Real>& x, const Tensor<Real>& weights,
                               const Tensor<Real>& bias) {
  require_rank(x, 2, "conv1d_transposed", "input");
  require_rank(weights, 3, "conv1d_transposed", "weights");
  require_rank(bias, 1, "conv1d_transposed", "bias");
  const std::size_t cin = x.dim(0), length = x.dim(1);
  const std::size_t cout = weights.dim(1);
  if (weights.dim(0) != cin) dim_mismatch("conv1d_transposed", "weight in-channels (dim 0)", weights.dim(0), cin);
  if (weights.dim(2) != 2) dim_mismatch("conv1d_transposed", "weight kernel (dim 2)", weights.dim(2), 2);
  if (bias.dim(0) != cout) dim_mismatch("conv1d_transposed", "bias length (dim 0)", bias.dim(0), cout);

  const std::size_t out_len = 2 * length;
  auto in = x.data();
  auto w = weights.data();
  auto b = bias.data();
  std::vector<Real> out(cout * out_len);
  for (std::size_t o = 0; o < cout; ++o) {
    Real* y = out.data() + o * out_len;
    std::fill(y, y + out_len, b[o]);
    for (std::size_t i = 0; i < cin; ++i) {
      const Real* xi = in.data() + i * length;
      const Real w0 = w[(i * cout + o) * 2];
      const Real w1 = w[(i * cout + o) * 2 + 1];
      for (std::size_t t = 0; t < length; ++t) {
        y[2 * t] += w0 * xi[t];
        y[2 * t + 1] += w1 * xi[t];
      }
    }
  }
  return make_result<Real>(
      {cout, out_len}, std::move(out), {&x, &weights, &bias}, "conv1d_transposed",
      [=](Node<Real>& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        auto& pb = *self.parents[2];
        for (std::size_t o = 0; o < cout; ++o) {
          const Real* gy = self.grad.data() + o * out_len;
          if (pb.requires_grad) {
            Real acc = 0;
            for (std::size_t t = 0; t < out_len; ++t) acc += gy[t];
            pb.grad[o] += acc;
          }
          for (std::size_t i = 0; i < cin; ++i) {
            const std::size_t wi = (i * cout + o) * 2;
            const Real* xi = px.value.data() + i * length;
            if (pw.requires_grad) {
              Real a0 = 0, a1 = 0;
              for (std::size_t t = 0; t < length; ++t) {
                a0 += gy[2 * t] * xi[t];
                a1 += gy[2 * t + 1] * xi[t];
              }
              pw.grad[wi] += a0;
              pw.grad[wi + 1] += a1;
            }
            if (px.requires_grad) {
              const Real w0 = pw.value[wi], w1 = pw.value[wi + 1];
              Real* gx = px.grad.data() + i * length;
              for (std::size_t t = 0; t < length; ++t) {
                gx[t] += w0 * gy[2 * t] + w1 * gy[2 * t + 1];
              }
            }
          }
        }
      });
}

#define FULLCONV_INSTANTIATE_OPS(Real)                                                        \
  template void ensure_finite<Real>(std::span<const Real>, const char*);                     \
  template Tensor<Real> add(const Tensor<Real>&, const Tensor<Real>&);                        \
  template Tensor<Real> sub(const Tensor<Real>&, const Tensor<Real>&);                        \
  template Tensor<Real> mul(const Tensor<Real>&, const Tensor<Real>&);                        \
  template Tensor<Real> scale(const Tensor<Real>&, Real);                                     \
  template Tensor<Real> add_scalar(const Tensor<Real>&, Real);                                \
  template Tensor<Real> sigmoid(const Tensor<Real>&);                                         \
  template Tensor<Real> relu(const Tensor<Real>&);                                            \
  template Tensor<Real> softplus(const Tensor<Real>&);                                        \
  template Tensor<Real> absolute(const Tensor<Real>&);                                        \
  template Tensor<Real> sum(const Tensor<Real>&);                                             \
  template Tensor<Real> mean(const Tensor<Real>&);                                            \
  template Tensor<Real> weighted_sum(const Tensor<Real>&, const Tensor<Real>&);               \
  template Tensor<Real> matmul(const Tensor<Real>&, const Tensor<Real>&);                     \
  template Tensor<Real> transpose(const Tensor<Real>&);                                       \
  template Tensor<Real> softmax_columns(const Tensor<Real>&, std::size_t);                    \
  template Tensor<Real> concat_channels(const Tensor<Real>&, const Tensor<Real>&);            \
  template Tensor<Real> slice_rows(const Tensor<Real>&, std::size_t, std::size_t);           \
  template Tensor<Real> slice_columns(const Tensor<Real>&, std::size_t, std::size_t);        \
  template Tensor<Real> shift_right(const Tensor<Real>&);                                     \
  template Tensor<Real> embedding(const Tensor<Real>&, std::span<const std::int32_t>);        \
  template Tensor<Real> conv1d(const Tensor<Real>&, const ConvLayerSpec&, const Tensor<Real>&, \
                               const Tensor<Real>&);                                          \
  template Tensor<Real> conv1d_transposed(const Tensor<Real>&, const Tensor<Real>&,           \
                                          const Tensor<Real>&);

FULLCONV_INSTANTIATE_OPS(float)
FULLCONV_INSTANTIATE_OPS(double)

}  // namespace fullconv
