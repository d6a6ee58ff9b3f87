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
#include <cstdint>
#include <span>
#include <vector>

#include "fullconv/tensor.h"

namespace fullconv {

/// One 1-D convolution layer. Same-length padding: causal layers left-pad
/// (K-1)*dilation zeros, non-causal layers pad symmetrically (odd K only).
/// `upsample` marks a kernel-2 stride-2 transposed convolution instead.
struct ConvLayerSpec {
  std::size_t in_channels = 1;
  std::size_t out_channels = 1;
  std::size_t kernel_size = 1;
  std::size_t dilation = 1;
  bool causal = false;
  bool has_nonlinearity = false;
  bool residual = false;
  bool upsample = false;

  bool operator==(const ConvLayerSpec&) const = default;
};

// Elementwise. Binary ops require identical shapes.
template <typename Real> Tensor<Real> add(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real> Tensor<Real> sub(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real> Tensor<Real> mul(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real> Tensor<Real> scale(const Tensor<Real>& a, Real factor);
template <typename Real> Tensor<Real> add_scalar(const Tensor<Real>& a, Real offset);
template <typename Real> Tensor<Real> sigmoid(const Tensor<Real>& x);
template <typename Real> Tensor<Real> relu(const Tensor<Real>& x);
/// log(1 + e^x) evaluated as max(x, 0) + log1p(e^-|x|).
template <typename Real> Tensor<Real> softplus(const Tensor<Real>& x);
template <typename Real> Tensor<Real> absolute(const Tensor<Real>& x);

// Reductions to a rank-0 tensor.
template <typename Real> Tensor<Real> sum(const Tensor<Real>& x);
template <typename Real> Tensor<Real> mean(const Tensor<Real>& x);
/// sum(x * weights); `weights` is treated as a constant.
template <typename Real>
Tensor<Real> weighted_sum(const Tensor<Real>& x, const Tensor<Real>& weights);

// Matrix ops on rank-2 tensors.
template <typename Real> Tensor<Real> matmul(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real> Tensor<Real> transpose(const Tensor<Real>& x);
/// Column-wise softmax over the first `valid_rows` rows (all rows when 0);
/// rows at or beyond `valid_rows` are exactly zero.
template <typename Real>
Tensor<Real> softmax_columns(const Tensor<Real>& x, std::size_t valid_rows = 0);
/// [a; b] along the channel (row) axis.
template <typename Real>
Tensor<Real> concat_channels(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> slice_rows(const Tensor<Real>& x, std::size_t begin, std::size_t count);
template <typename Real>
Tensor<Real> slice_columns(const Tensor<Real>& x, std::size_t begin, std::size_t count);
/// Column t of the result is column t-1 of x; column 0 is zero.
template <typename Real> Tensor<Real> shift_right(const Tensor<Real>& x);

/// Looks up columns of an embedding table [vocab x dim]; result is [dim x N].
template <typename Real>
Tensor<Real> embedding(const Tensor<Real>& table, std::span<const std::int32_t> ids);

/// x [C_in x T], weights [C_out x C_in x K], bias [C_out] -> [C_out x T].
template <typename Real>
Tensor<Real> conv1d(const Tensor<Real>& x, const ConvLayerSpec& spec,
                    const Tensor<Real>& weights, const Tensor<Real>& bias);

/// Kernel-2 stride-2 transposed convolution.
/// x [C_in x T], weights [C_in x C_out x 2], bias [C_out] -> [C_out x 2T].
template <typename Real>
Tensor<Real> conv1d_transposed(const Tensor<Real>& x, const Tensor<Real>& weights,
                               const Tensor<Real>& bias);

template <typename Real>
Tensor<Real> operator+(const Tensor<Real>& a, const Tensor<Real>& b) { return add(a, b); }
template <typename Real>
Tensor<Real> operator-(const Tensor<Real>& a, const Tensor<Real>& b) { return sub(a, b); }
template <typename Real>
Tensor<Real> operator*(const Tensor<Real>& a, const Tensor<Real>& b) { return mul(a, b); }

/// Throws ErrorKind::kNumeric when any value is NaN or Inf.
template <typename Real>
void ensure_finite(std::span<const Real> values, const char* what);

}  // namespace fullconv
