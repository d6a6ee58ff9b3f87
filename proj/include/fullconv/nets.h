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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fullconv/ops.h"
#include "fullconv/params.h"
#include "fullconv/tensor.h"

namespace fullconv {

/// Knobs from which the four layer plans are generated. Defaults are the
/// full-size model; tests shrink widths and dilation stacks.
struct PlanOptions {
  std::size_t vocab_size = 0;
  std::size_t e = 128;  // character embedding
  std::size_t d = 256;  // hidden / attention width
  std::size_t c = 512;  // SSRN width
  std::size_t n_mels = 80;
  std::size_t n_linear = 513;
  std::size_t kernel_size = 3;
  std::vector<std::size_t> dilations{1, 3, 9, 27};
  std::size_t text_blocks = 2;
  std::size_t audio_encoder_blocks = 2;
  std::size_t audio_decoder_blocks = 1;
  std::vector<std::size_t> ssrn_dilations{1, 3};
};

struct NetworkConfig {
  std::size_t e = 128;
  std::size_t d = 256;
  std::size_t c = 512;
  std::size_t n_mels = 80;
  std::size_t n_linear = 513;
  std::size_t vocab_size = 0;

  // Layer plans. Residual layers compute x + relu(conv(x)); layers flagged
  // has_nonlinearity are followed by relu; upsample layers are stride-2
  // transposed convolutions.
  std::vector<ConvLayerSpec> text_encoder;
  std::vector<ConvLayerSpec> audio_encoder;
  std::vector<ConvLayerSpec> audio_decoder;
  std::vector<ConvLayerSpec> ssrn;

  /// Checks channel chaining, causality flags and the two SSRN upsamplers.
  void validate() const;
};

NetworkConfig build_network_config(const PlanOptions& options);

/// Frames of past context seen by the last output of a causal plan.
std::size_t causal_lookback(const std::vector<ConvLayerSpec>& plan);
/// Half-width of the window seen by a non-causal plan (no upsampling).
std::size_t noncausal_radius(const std::vector<ConvLayerSpec>& plan);

/// Parameter names, e.g. "text2mel/audio_decoder/conv03/weight".
std::string layer_param_name(const std::string& network, const std::string& block,
                             std::size_t index, const ConvLayerSpec& spec,
                             const std::string& field);

template <typename Real>
ParameterSet<Real> init_text2mel(const NetworkConfig& cfg, std::mt19937_64& rng);
template <typename Real>
ParameterSet<Real> init_ssrn(const NetworkConfig& cfg, std::mt19937_64& rng);

/// Runs one plan. Shared by every sub-network.
template <typename Real>
Tensor<Real> run_plan(const ParameterSet<Real>& params, const std::string& network,
                      const std::string& block, const std::vector<ConvLayerSpec>& plan,
                      Tensor<Real> x);

template <typename Real>
struct TextEncoding {
  Tensor<Real> keys;    // d x N
  Tensor<Real> values;  // d x N
};

template <typename Real>
TextEncoding<Real> text_encoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                                std::span<const std::int32_t> ids);

template <typename Real>
Tensor<Real> audio_encoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                           const Tensor<Real>& mel);

/// K^T Q / sqrt(d), the pre-softmax scores (N x T).
template <typename Real>
Tensor<Real> attention_logits(const Tensor<Real>& keys, const Tensor<Real>& queries);

template <typename Real>
Tensor<Real> attention(const Tensor<Real>& keys, const Tensor<Real>& queries);

/// R = V A.
template <typename Real>
Tensor<Real> attend(const Tensor<Real>& values, const Tensor<Real>& alignment);

template <typename Real>
Tensor<Real> audio_decoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                           const Tensor<Real>& r_prime);

template <typename Real>
struct Text2MelOutput {
  Tensor<Real> logits;     // n_mels x T
  Tensor<Real> alignment;  // N x T
};

template <typename Real>
Text2MelOutput<Real> text2mel_forward(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                                      std::span<const std::int32_t> ids,
                                      const Tensor<Real>& mel_input);

/// Coarse mel (n_mels x T) to linear logits (n_linear x 4T).
template <typename Real>
Tensor<Real> ssrn_forward(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                          const Tensor<Real>& coarse);

}  // namespace fullconv
