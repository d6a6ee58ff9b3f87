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

#include "fullconv/losses.h"

#include <cmath>
#include <string>

#include "fullconv/error.h"
#include "fullconv/ops.h"

namespace fullconv {
namespace {

template <typename Real>
void check_pair(const Tensor<Real>& logits, const Tensor<Real>& target, const Tensor<Real>* mask,
                const char* what) {
  if (logits.shape() != target.shape()) {
    fail(ErrorKind::kShape, std::string(what) + ": logits " + shape_string(logits.shape()) +
                                " vs target " + shape_string(target.shape()));
  }
  if (mask && mask->shape() != target.shape()) {
    fail(ErrorKind::kShape, std::string(what) + ": mask " + shape_string(mask->shape()) +
                                " vs target " + shape_string(target.shape()));
  }
}

// Per-cell weights realizing the (masked) mean.
template <typename Real>
Tensor<Real> mean_weights(const Tensor<Real>& target, const Tensor<Real>* mask,
                          const char* what) {
  std::vector<Real> w(target.numel());
  double count = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Real m = mask ? mask->data()[i] : Real(1);
    if (m != Real(0) && m != Real(1)) fail(ErrorKind::kInvalidArgument, std::string(what) + ": mask must be 0/1");
    w[i] = m;
    count += static_cast<double>(m);
  }
  if (count == 0) fail(ErrorKind::kInvalidArgument, std::string(what) + ": mask selects no cell");
  const Real inv = static_cast<Real>(1.0 / count);
  for (auto& v : w) v *= inv;
  return Tensor<Real>::from_data(target.shape(), std::move(w));
}

}  // namespace

double guided_weight(double x, double y, double g) {
  const double gap = x - y;
  return 1.0 - std::exp(-gap * gap / (2.0 * g * g));
}

GuidedAttentionWeights guided_weights(std::size_t n, std::size_t t, double g) {
  if (n == 0 || t == 0) fail(ErrorKind::kInvalidArgument, "guided_weights: empty matrix");
  if (!(g > 0)) fail(ErrorKind::kInvalidArgument, "guided_weights: g must be positive");
  GuidedAttentionWeights w{n, t, g, std::vector<double>(n * t)};
  const double dn = n > 1 ? static_cast<double>(n - 1) : 1.0;
  const double dt = t > 1 ? static_cast<double>(t - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < t; ++j)
      w.values[i * t + j] = guided_weight(static_cast<double>(i) / dn, static_cast<double>(j) / dt, g);
  return w;
}

template <typename Real>
Tensor<Real> GuidedAttentionWeights::as_tensor(std::size_t padded_cols) const {
  const std::size_t width = padded_cols == 0 ? cols : padded_cols;
  if (width < cols) fail(ErrorKind::kShape, "guided weights: padding narrower than T");
  std::vector<Real> out(rows * width, Real(0));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) out[i * width + j] = static_cast<Real>(at(i, j));
  return Tensor<Real>::from_data({rows, width}, std::move(out));
}

template <typename Real>
Tensor<Real> binary_divergence(const Tensor<Real>& logits, const Tensor<Real>& target,
                               const Tensor<Real>* mask) {
  check_pair(logits, target, mask, "binary_divergence");
  for (Real s : target.data()) {
    if (!(s >= Real(0) && s <= Real(1)))
      fail(ErrorKind::kInvalidArgument, "binary_divergence: target outside [0, 1]");
  }
  auto cells = sub(softplus(logits), mul(target, logits));
  return weighted_sum(cells, mean_weights(target, mask, "binary_divergence"));
}

template <typename Real>
Tensor<Real> l1_term(const Tensor<Real>& logits, const Tensor<Real>& target,
                     const Tensor<Real>* mask) {
  check_pair(logits, target, mask, "l1_term");
  return weighted_sum(absolute(sub(sigmoid(logits), target)),
                      mean_weights(target, mask, "l1_term"));
}

template <typename Real>
Tensor<Real> l_hiera(const Tensor<Real>& logits, const Tensor<Real>& target,
                     const Tensor<Real>* mask) {
  return add(binary_divergence(logits, target, mask), l1_term(logits, target, mask));
}

template <typename Real>
Tensor<Real> guided_attention_loss(const Tensor<Real>& alignment, const Tensor<Real>& weights,
                                   double count) {
  if (alignment.shape() != weights.shape()) {
    fail(ErrorKind::kShape, "guided_attention_loss: alignment " + shape_string(alignment.shape()) +
                                " vs weights " + shape_string(weights.shape()));
  }
  if (count < 0) fail(ErrorKind::kInvalidArgument, "guided_attention_loss: negative count");
  const double divisor = count == 0 ? static_cast<double>(alignment.numel()) : count;
  return scale(weighted_sum(alignment, weights), static_cast<Real>(1.0 / divisor));
}

template <typename Real>
Tensor<Real> total_t2m_loss(const Tensor<Real>& logits, const Tensor<Real>& target,
                            const Tensor<Real>& alignment, const Tensor<Real>& weights,
                            double lambda_attn) {
  if (lambda_attn < 0) fail(ErrorKind::kInvalidArgument, "total_t2m_loss: negative lambda");
  auto main = l_hiera(logits, target);
  if (lambda_attn == 0) return main;
  return add(main, scale(guided_attention_loss(alignment, weights), static_cast<Real>(lambda_attn)));
}

template <typename Real>
double alignment_error(const Tensor<Real>& alignment) {
  if (alignment.rank() != 2) fail(ErrorKind::kShape, "alignment_error: expected an N x T matrix");
  const std::size_t n = alignment.dim(0), t = alignment.dim(1);
  double total = 0;
  for (std::size_t j = 0; j < t; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (alignment.at(i, j) > alignment.at(best, j)) best = i;
    total += std::abs(static_cast<double>(best) / n - static_cast<double>(j) / t);
  }
  return total / t;
}

#define FULLCONV_INSTANTIATE_LOSSES(Real)                                                        \
  template Tensor<Real> GuidedAttentionWeights::as_tensor<Real>(std::size_t) const;             \
  template Tensor<Real> binary_divergence(const Tensor<Real>&, const Tensor<Real>&,             \
                                          const Tensor<Real>*);                                 \
  template Tensor<Real> l1_term(const Tensor<Real>&, const Tensor<Real>&, const Tensor<Real>*); \
  template Tensor<Real> l_hiera(const Tensor<Real>&, const Tensor<Real>&, const Tensor<Real>*); \
  template Tensor<Real> guided_attention_loss(const Tensor<Real>&, const Tensor<Real>&, double); \
  template Tensor<Real> total_t2m_loss(const Tensor<Real>&, const Tensor<Real>&,                \
                                       const Tensor<Real>&, const Tensor<Real>&, double); \
  template double alignment_error(const Tensor<Real>&);

FULLCONV_INSTANTIATE_LOSSES(float)
FULLCONV_INSTANTIATE_LOSSES(double)

}  // namespace fullconv
