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
#include <vector>

#include "fullconv/tensor.h"

namespace fullconv {

/// 1 - exp(-(x - y)^2 / (2 g^2)) for normalized positions x, y.
double guided_weight(double x, double y, double g = 0.2);

/// W[n, t] with n / (N - 1) and t / (T - 1) as the normalized positions
/// (a single row or column sits at position 0).
struct GuidedAttentionWeights {
  std::size_t rows = 0;  // N
  std::size_t cols = 0;  // T
  double g = 0.2;
  std::vector<double> values;  // row-major N x T

  double at(std::size_t n, std::size_t t) const { return values[n * cols + t]; }

  /// N x `padded_cols` constant tensor; columns at or past `cols` are zero.
  template <typename Real>
  Tensor<Real> as_tensor(std::size_t padded_cols = 0) const;
};

GuidedAttentionWeights guided_weights(std::size_t n, std::size_t t, double g = 0.2);

// The losses below take an optional 0/1 cell mask with the shape of the
// target. Without a mask they average over every cell, with one they
// average over the unmasked cells only.

/// mean(-S * y + softplus(y)) over logits y. Throws if S leaves [0, 1].
template <typename Real>
Tensor<Real> binary_divergence(const Tensor<Real>& logits, const Tensor<Real>& target,
                               const Tensor<Real>* mask = nullptr);

/// mean(|sigmoid(y) - S|).
template <typename Real>
Tensor<Real> l1_term(const Tensor<Real>& logits, const Tensor<Real>& target,
                     const Tensor<Real>* mask = nullptr);

template <typename Real>
Tensor<Real> l_hiera(const Tensor<Real>& logits, const Tensor<Real>& target,
                     const Tensor<Real>* mask = nullptr);

/// sum(A * W) / count; count 0 means A.numel().
template <typename Real>
Tensor<Real> guided_attention_loss(const Tensor<Real>& alignment, const Tensor<Real>& weights,
                                   double count = 0.0);

template <typename Real>
Tensor<Real> total_t2m_loss(const Tensor<Real>& logits, const Tensor<Real>& target,
                            const Tensor<Real>& alignment, const Tensor<Real>& weights,
                            double lambda_attn);

/// Diagnostic: mean over columns t of |argmax_n A[n, t] / N - t / T|.
template <typename Real>
double alignment_error(const Tensor<Real>& alignment);

}  // namespace fullconv
