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

#include "fullconv/synth.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "fullconv/error.h"
#include "fullconv/mel.h"
#include "fullconv/ops.h"
#include "fullconv/stft.h"

namespace fullconv {
namespace {

std::size_t argmax_of(std::span<const float> column) {
  return static_cast<std::size_t>(std::max_element(column.begin(), column.end()) - column.begin());
}

}  // namespace

std::vector<double> force_diagonal(std::span<const double> logits, std::size_t prev_pos,
                                   std::size_t back, std::size_t ahead) {
  if (logits.empty()) fail(ErrorKind::kInvalidArgument, "force_diagonal: empty column");
  const std::size_t lo = prev_pos > back ? prev_pos - back : 0;
  const std::size_t hi = std::min(logits.size() - 1, prev_pos + ahead);
  if (lo > hi) fail(ErrorKind::kInvalidArgument, "force_diagonal: window outside the column");
  std::vector<double> out(logits.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = lo; i <= hi; ++i) out[i] = logits[i];
  return out;
}

DecodeResult incremental_decode(std::span<const std::int32_t> ids, const ParameterSet<float>& params,
                                const NetworkConfig& cfg, const SynthesisConfig& syn) {
  if (ids.empty()) fail(ErrorKind::kInvalidArgument, "incremental_decode: empty character sequence");
  syn.validate();
  NoGradGuard guard;
  const std::size_t n = ids.size(), f = cfg.n_mels;
  const std::size_t max_frames = syn.max_frames ? syn.max_frames : 4 * n + 40;
  auto text = text_encoder(params, cfg, ids);

  // Columns of the decoder input (zero frame first) and of the attention.
  std::vector<std::vector<float>> frames{std::vector<float>(f, 0.0f)};
  std::vector<std::vector<float>> columns;
  DecodeResult out;
  out.text_length = n;
  std::size_t focus = 0, quiet = 0;

  while (columns.size() < max_frames) {
    const std::size_t t = frames.size();
    std::vector<float> input(f * t);
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t b = 0; b < f; ++b) input[b * t + j] = frames[j][b];
    auto q = audio_encoder(params, cfg, Tensor<float>::from_data({f, t}, std::move(input)));
    auto scores = attention_logits(text.keys, slice_columns(q, t - 1, 1));

    std::vector<float> column(n);
    if (syn.forcing_enabled) {
      std::vector<double> raw(scores.data().begin(), scores.data().end());
      auto masked = force_diagonal(raw, focus, syn.forcing_back, syn.forcing_ahead);
      const double top = *std::max_element(masked.begin(), masked.end());
      double total = 0;
      for (auto& v : masked) total += (v = std::exp(v - top));
      for (std::size_t i = 0; i < n; ++i) column[i] = static_cast<float>(masked[i] / total);
    } else {
      auto a = softmax_columns(scores);
      std::copy(a.data().begin(), a.data().end(), column.begin());
    }
    const std::size_t peak = argmax_of(column);
    focus = std::max(focus, peak);
    out.argmax.push_back(peak);
    out.focus.push_back(focus);
    columns.push_back(std::move(column));

    std::vector<float> align(n * t);
    for (std::size_t j = 0; j < t; ++j)
      for (std::size_t i = 0; i < n; ++i) align[i * t + j] = columns[j][i];
    auto r = attend(text.values, Tensor<float>::from_data({n, t}, std::move(align)));
    auto logits = audio_decoder(params, cfg, concat_channels(r, q));
    auto next = sigmoid(slice_columns(logits, t - 1, 1));
    std::vector<float> frame(next.data().begin(), next.data().end());
    ensure_finite<float>(frame, "decoded frame");

    double energy = 0;
    for (float v : frame) energy += v;
    energy /= static_cast<double>(f);
    frames.push_back(std::move(frame));
    quiet = (energy < syn.stop_threshold && peak + 1 >= n) ? quiet + 1 : 0;
    if (quiet >= syn.stop_frames) {
      out.stopped = true;
      break;
    }
  }

  const std::size_t t_out = columns.size();
  out.mel = Spectrogram(SpectrogramKind::kMel, f, t_out);
  out.mel.normalized = true;
  out.mel.reduced = true;
  out.alignment.resize(n * t_out);
  for (std::size_t j = 0; j < t_out; ++j) {
    for (std::size_t b = 0; b < f; ++b) out.mel.at(b, j) = frames[j + 1][b];
    for (std::size_t i = 0; i < n; ++i) out.alignment[i * t_out + j] = columns[j][i];
  }
  return out;
}

Synthesizer Synthesizer::load(const Checkpoint& t2m_ckpt, const Checkpoint& ssrn_ckpt) {
  Synthesizer s;
  s.config = parse_run_config(t2m_ckpt.config_echo);
  const auto ssrn_config = parse_run_config(ssrn_ckpt.config_echo);
  if (s.config.vocab.empty()) fail(ErrorKind::kData, "Text2Mel checkpoint carries no vocabulary");
  if (!ssrn_config.vocab.empty() && ssrn_config.vocab != s.config.vocab)
    fail(ErrorKind::kData, "Text2Mel and SSRN checkpoints were trained on different vocabularies");
  if (ssrn_config.features.n_mels != s.config.features.n_mels ||
      ssrn_config.features.stft.n_fft != s.config.features.stft.n_fft)
    fail(ErrorKind::kData, "Text2Mel and SSRN checkpoints disagree on spectrogram sizes");
  s.vocab = Vocabulary::deserialize(s.config.vocab);
  s.t2m_net = network_config(s.config);
  auto ssrn_cfg = ssrn_config;
  ssrn_cfg.vocab = s.config.vocab;
  s.ssrn_net = network_config(ssrn_cfg);
  std::mt19937_64 unused(0);
  s.t2m = init_text2mel<float>(s.t2m_net, unused);
  s.ssrn = init_ssrn<float>(s.ssrn_net, unused);
  restore_checkpoint(t2m_ckpt, s.t2m, nullptr);
  restore_checkpoint(ssrn_ckpt, s.ssrn, nullptr);
  return s;
}

SynthesisResult Synthesizer::synthesize(const std::string& text, const SynthesisConfig& syn) const {
  for (char32_t ch : utf8_decode(text)) {
    if (vocab.id(ch) == Vocabulary::kUnk) {
      fail(ErrorKind::kData, "character '" + utf8_encode(std::u32string(1, ch)) +
                                 "' is not in the model vocabulary");
    }
  }
  SynthesisResult out;
  const auto ids = encode_text(text, vocab);
  out.decode = incremental_decode(ids, t2m, t2m_net, syn);
  NoGradGuard guard;
  const auto& mel = out.decode.mel;
  auto linear = sigmoid(ssrn_forward(ssrn, ssrn_net, Tensor<float>::from_data({mel.bins, mel.frames}, mel.values)));
  out.linear = Spectrogram(SpectrogramKind::kLinear, linear.dim(0), linear.dim(1));
  std::copy(linear.data().begin(), linear.data().end(), out.linear.values.begin());
  out.linear.normalized = true;
  const auto magnitudes = denormalize(out.linear, config.features.norm);
  out.wave = griffin_lim(magnitudes, config.features.stft, static_cast<int>(syn.gla_iterations));
  return out;
}

void write_alignment_pgm(const std::filesystem::path& path, const DecodeResult& decode) {
  const std::size_t rows = decode.text_length, cols = decode.mel.frames;
  if (rows == 0 || cols == 0) fail(ErrorKind::kInvalidArgument, "write_alignment_pgm: empty alignment");
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::kIo, "cannot write " + path.string());
  os << "P5\n" << cols << ' ' << rows << "\n255\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const float a = std::clamp(decode.attention(i, j), 0.0f, 1.0f);
      os.put(static_cast<char>(static_cast<unsigned char>(std::lround(a * 255.0f))));
    }
  }
  if (!os) fail(ErrorKind::kIo, "failed writing " + path.string());
}

}  // namespace fullconv
