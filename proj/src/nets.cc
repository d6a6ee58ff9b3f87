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

#include "fullconv/nets.h"

#include <cmath>
#include <cstdio>

#include "fullconv/error.h"

namespace fullconv {
namespace {

void check_chain(const std::vector<ConvLayerSpec>& plan, const char* name, std::size_t in,
                 std::size_t out) {
  if (plan.empty()) fail(ErrorKind::kConfig, std::string(name) + ": empty layer plan");
  std::size_t channels = in;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& s = plan[i];
    const std::string where = std::string(name) + " layer " + std::to_string(i);
    if (s.in_channels != channels) {
      fail(ErrorKind::kConfig, where + ": expects " + std::to_string(s.in_channels) +
                                   " input channels, previous layer gives " +
                                   std::to_string(channels));
    }
    if (s.kernel_size == 0 || s.dilation == 0 || s.out_channels == 0)
      fail(ErrorKind::kConfig, where + ": zero kernel, dilation or width");
    if (s.residual && s.in_channels != s.out_channels)
      fail(ErrorKind::kConfig, where + ": residual layer must keep its width");
    if (s.upsample && (s.kernel_size != 2 || s.residual))
      fail(ErrorKind::kConfig, where + ": upsampling layers are plain kernel-2 deconvolutions");
    if (!s.upsample && !s.causal && s.kernel_size % 2 == 0)
      fail(ErrorKind::kConfig, where + ": non-causal kernels must be odd");
    channels = s.out_channels;
  }
  if (channels != out) {
    fail(ErrorKind::kConfig, std::string(name) + ": produces " + std::to_string(channels) +
                                 " channels, expected " + std::to_string(out));
  }
}

void check_causality(const std::vector<ConvLayerSpec>& plan, const char* name, bool causal) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (plan[i].causal != causal || (causal && plan[i].upsample)) {
      fail(ErrorKind::kConfig, std::string(name) + " layer " + std::to_string(i) +
                                   (causal ? " must be causal" : " must be non-causal"));
    }
  }
}

ConvLayerSpec pointwise(std::size_t in, std::size_t out, bool causal, bool relu) {
  ConvLayerSpec s;
  s.in_channels = in;
  s.out_channels = out;
  s.causal = causal;
  s.has_nonlinearity = relu;
  return s;
}

ConvLayerSpec residual(std::size_t width, std::size_t kernel, std::size_t dilation,
                       bool causal) {
  ConvLayerSpec s;
  s.in_channels = width;
  s.out_channels = width;
  s.kernel_size = kernel;
  s.dilation = dilation;
  s.causal = causal;
  s.has_nonlinearity = true;
  s.residual = true;
  return s;
}

ConvLayerSpec deconv(std::size_t width) {
  ConvLayerSpec s;
  s.in_channels = width;
  s.out_channels = width;
  s.kernel_size = 2;
  s.has_nonlinearity = true;
  s.upsample = true;
  return s;
}

void append_stack(std::vector<ConvLayerSpec>& plan, std::size_t blocks,
                  const std::vector<std::size_t>& dilations, std::size_t width,
                  std::size_t kernel, bool causal) {
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t dil : dilations) plan.push_back(residual(width, kernel, dil, causal));
}

std::size_t count_residual(const std::vector<ConvLayerSpec>& plan) {
  std::size_t n = 0;
  for (const auto& s : plan) n += s.residual ? 1 : 0;
  return n;
}

// He-style Gaussian init. Residual branches are damped by the stack depth so
// the activation scale stays bounded through long dilation pyramids.
template <typename Real>
void add_plan_params(ParameterSet<Real>& params, const std::string& network,
                     const std::string& block, const std::vector<ConvLayerSpec>& plan,
                     std::mt19937_64& rng) {
  const double depth = static_cast<double>(std::max<std::size_t>(1, count_residual(plan)));
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& s = plan[i];
    Shape wshape = s.upsample ? Shape{s.in_channels, s.out_channels, 2}
                              : Shape{s.out_channels, s.in_channels, s.kernel_size};
    const double fan_in = static_cast<double>(s.in_channels * s.kernel_size);
    double gain = s.has_nonlinearity ? 2.0 : 1.0;
    if (s.residual) gain /= depth;
    params.add(layer_param_name(network, block, i, s, "weight"),
               gaussian_init<Real>(wshape, std::sqrt(gain / fan_in), rng));
    params.add(layer_param_name(network, block, i, s, "bias"),
               Tensor<Real>::zeros({s.out_channels}, true));
  }
}

}  // namespace

void NetworkConfig::validate() const {
  if (e == 0 || d == 0 || c == 0 || n_mels == 0 || n_linear == 0)
    fail(ErrorKind::kConfig, "network dimensions must be positive");
  if (vocab_size < 3) fail(ErrorKind::kConfig, "vocabulary must hold at least PAD, EOS and UNK");
  check_chain(text_encoder, "text_encoder", e, 2 * d);
  check_chain(audio_encoder, "audio_encoder", n_mels, d);
  check_chain(audio_decoder, "audio_decoder", 2 * d, n_mels);
  check_chain(ssrn, "ssrn", n_mels, n_linear);
  check_causality(text_encoder, "text_encoder", false);
  check_causality(audio_encoder, "audio_encoder", true);
  check_causality(audio_decoder, "audio_decoder", true);
  check_causality(ssrn, "ssrn", false);
  std::size_t upsamplers = 0;
  for (const auto& s : ssrn) upsamplers += s.upsample ? 1 : 0;
  if (upsamplers != 2) fail(ErrorKind::kConfig, "ssrn needs exactly two upsampling layers");
  for (const auto* plan : {&text_encoder, &audio_encoder, &audio_decoder})
    for (const auto& s : *plan)
      if (s.upsample) fail(ErrorKind::kConfig, "only ssrn may upsample");
}

NetworkConfig build_network_config(const PlanOptions& o) {
  NetworkConfig cfg;
  cfg.e = o.e;
  cfg.d = o.d;
  cfg.c = o.c;
  cfg.n_mels = o.n_mels;
  cfg.n_linear = o.n_linear;
  cfg.vocab_size = o.vocab_size;
  const std::size_t k = o.kernel_size;

  cfg.text_encoder.push_back(pointwise(o.e, 2 * o.d, false, true));
  append_stack(cfg.text_encoder, o.text_blocks, o.dilations, 2 * o.d, k, false);
  cfg.text_encoder.push_back(pointwise(2 * o.d, 2 * o.d, false, true));
  cfg.text_encoder.push_back(pointwise(2 * o.d, 2 * o.d, false, false));

  cfg.audio_encoder.push_back(pointwise(o.n_mels, o.d, true, true));
  append_stack(cfg.audio_encoder, o.audio_encoder_blocks, o.dilations, o.d, k, true);

  cfg.audio_decoder.push_back(pointwise(2 * o.d, o.d, true, true));
  append_stack(cfg.audio_decoder, o.audio_decoder_blocks, o.dilations, o.d, k, true);
  cfg.audio_decoder.push_back(pointwise(o.d, o.d, true, true));
  cfg.audio_decoder.push_back(pointwise(o.d, o.d, true, true));
  cfg.audio_decoder.push_back(pointwise(o.d, o.n_mels, true, false));

  cfg.ssrn.push_back(pointwise(o.n_mels, o.c, false, true));
  append_stack(cfg.ssrn, 1, o.ssrn_dilations, o.c, k, false);
  for (int up = 0; up < 2; ++up) {
    cfg.ssrn.push_back(deconv(o.c));
    append_stack(cfg.ssrn, 1, o.ssrn_dilations, o.c, k, false);
  }
  cfg.ssrn.push_back(pointwise(o.c, o.c, false, true));
  cfg.ssrn.push_back(pointwise(o.c, o.n_linear, false, false));

  cfg.validate();
  return cfg;
}

std::size_t causal_lookback(const std::vector<ConvLayerSpec>& plan) {
  std::size_t total = 0;
  for (const auto& s : plan) total += (s.kernel_size - 1) * s.dilation;
  return total;
}

std::size_t noncausal_radius(const std::vector<ConvLayerSpec>& plan) {
  std::size_t total = 0;
  for (const auto& s : plan) {
    if (s.upsample) fail(ErrorKind::kInvalidArgument, "noncausal_radius: plan upsamples");
    total += (s.kernel_size - 1) / 2 * s.dilation;
  }
  return total;
}

std::string layer_param_name(const std::string& network, const std::string& block,
                             std::size_t index, const ConvLayerSpec& spec,
                             const std::string& field) {
  char layer[32];
  std::snprintf(layer, sizeof(layer), "%s%02zu", spec.upsample ? "deconv" : "conv", index);
  return network + "/" + block + "/" + layer + "/" + field;
}

template <typename Real>
ParameterSet<Real> init_text2mel(const NetworkConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  ParameterSet<Real> params;
  params.add("text2mel/text_encoder/embedding/weight",
             gaussian_init<Real>({cfg.vocab_size, cfg.e}, 0.3, rng));
  add_plan_params(params, "text2mel", "text_encoder", cfg.text_encoder, rng);
  add_plan_params(params, "text2mel", "audio_encoder", cfg.audio_encoder, rng);
  add_plan_params(params, "text2mel", "audio_decoder", cfg.audio_decoder, rng);
  return params;
}

template <typename Real>
ParameterSet<Real> init_ssrn(const NetworkConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  ParameterSet<Real> params;
  add_plan_params(params, "ssrn", "body", cfg.ssrn, rng);
  return params;
}

template <typename Real>
Tensor<Real> run_plan(const ParameterSet<Real>& params, const std::string& network,
                      const std::string& block, const std::vector<ConvLayerSpec>& plan,
                      Tensor<Real> x) {
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& s = plan[i];
    const auto& w = params.at(layer_param_name(network, block, i, s, "weight"));
    const auto& b = params.at(layer_param_name(network, block, i, s, "bias"));
    Tensor<Real> y = s.upsample ? conv1d_transposed(x, w, b) : conv1d(x, s, w, b);
    if (s.has_nonlinearity) y = relu(y);
    x = s.residual ? add(x, y) : y;
  }
  return x;
}

template <typename Real>
TextEncoding<Real> text_encoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                                std::span<const std::int32_t> ids) {
  auto h = embedding(params.at("text2mel/text_encoder/embedding/weight"), ids);
  h = run_plan(params, "text2mel", "text_encoder", cfg.text_encoder, h);
  return {slice_rows(h, 0, cfg.d), slice_rows(h, cfg.d, cfg.d)};
}

template <typename Real>
Tensor<Real> audio_encoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                           const Tensor<Real>& mel) {
  return run_plan(params, "text2mel", "audio_encoder", cfg.audio_encoder, mel);
}

template <typename Real>
Tensor<Real> attention_logits(const Tensor<Real>& keys, const Tensor<Real>& queries) {
  const Real inv = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(keys.dim(0))));
  return scale(matmul(transpose(keys), queries), inv);
}

template <typename Real>
Tensor<Real> attention(const Tensor<Real>& keys, const Tensor<Real>& queries) {
  return softmax_columns(attention_logits(keys, queries));
}

template <typename Real>
Tensor<Real> attend(const Tensor<Real>& values, const Tensor<Real>& alignment) {
  return matmul(values, alignment);
}

template <typename Real>
Tensor<Real> audio_decoder(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                           const Tensor<Real>& r_prime) {
  return run_plan(params, "text2mel", "audio_decoder", cfg.audio_decoder, r_prime);
}

template <typename Real>
Text2MelOutput<Real> text2mel_forward(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                                      std::span<const std::int32_t> ids,
                                      const Tensor<Real>& mel_input) {
  auto text = text_encoder(params, cfg, ids);
  auto q = audio_encoder(params, cfg, mel_input);
  auto a = attention(text.keys, q);
  auto r = attend(text.values, a);
  return {audio_decoder(params, cfg, concat_channels(r, q)), a};
}

template <typename Real>
Tensor<Real> ssrn_forward(const ParameterSet<Real>& params, const NetworkConfig& cfg,
                          const Tensor<Real>& coarse) {
  return run_plan(params, "ssrn", "body", cfg.ssrn, coarse);
}

#define FULLCONV_INSTANTIATE_NETS(Real)                                                     \
  template ParameterSet<Real> init_text2mel<Real>(const NetworkConfig&, std::mt19937_64&);  \
  template ParameterSet<Real> init_ssrn<Real>(const NetworkConfig&, std::mt19937_64&);      \
  template Tensor<Real> run_plan(const ParameterSet<Real>&, const std::string&,             \
                                 const std::string&, const std::vector<ConvLayerSpec>&,     \
                                 Tensor<Real>);                                             \
  template TextEncoding<Real> text_encoder(const ParameterSet<Real>&, const NetworkConfig&,  \
                                          std::span<const std::int32_t>);                   \
  template Tensor<Real> audio_encoder(const ParameterSet<Real>&, const NetworkConfig&,      \
                                      const Tensor<Real>&);                                 \
  template Tensor<Real> attention_logits(const Tensor<Real>&, const Tensor<Real>&);         \
  template Tensor<Real> attention(const Tensor<Real>&, const Tensor<Real>&);                \
  template Tensor<Real> attend(const Tensor<Real>&, const Tensor<Real>&);                   \
  template Tensor<Real> audio_decoder(const ParameterSet<Real>&, const NetworkConfig&,      \
                                      const Tensor<Real>&);                                 \
  template Text2MelOutput<Real> text2mel_forward(const ParameterSet<Real>&,                 \
                                                 const NetworkConfig&,                      \
                                                 std::span<const std::int32_t>,             \
                                                 const Tensor<Real>&);                      \
  template Tensor<Real> ssrn_forward(const ParameterSet<Real>&, const NetworkConfig&,       \
                                     const Tensor<Real>&);

FULLCONV_INSTANTIATE_NETS(float)
FULLCONV_INSTANTIATE_NETS(double)

}  // namespace fullconv
