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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fullconv/audio.h"
#include "fullconv/checkpoint.h"
#include "fullconv/config.h"
#include "fullconv/nets.h"
#include "fullconv/spectrogram.h"

namespace fullconv {

/// Pre-softmax attention scores with every position outside
/// [prev_pos - back, prev_pos + ahead] set to -infinity.
std::vector<double> force_diagonal(std::span<const double> logits, std::size_t prev_pos,
                                   std::size_t back, std::size_t ahead);

struct DecodeResult {
  Spectrogram mel;                      // n_mels x frames, normalized and reduced
  std::size_t text_length = 0;          // N
  std::vector<float> alignment;         // N x frames, row-major
  std::vector<std::size_t> argmax;      // raw argmax of each attention column
  std::vector<std::size_t> focus;       // forcing position after each step
  bool stopped = false;                 // stop rule fired before max_frames

  float attention(std::size_t n, std::size_t t) const { return alignment[n * mel.frames + t]; }
};

/// Autoregressive Text2Mel: starts from a zero frame and re-runs the causal
/// stack on the whole prefix at each step. Attention columns of earlier steps
/// are kept as they were (forced ones included).
DecodeResult incremental_decode(std::span<const std::int32_t> ids, const ParameterSet<float>& params,
                                const NetworkConfig& cfg, const SynthesisConfig& syn);

struct SynthesisResult {
  Waveform wave;
  DecodeResult decode;
  Spectrogram linear;  // normalized SSRN output
};

/// Loaded model pair plus the configuration stored with the Text2Mel weights.
struct Synthesizer {
  RunConfig config;
  Vocabulary vocab;
  NetworkConfig t2m_net;
  NetworkConfig ssrn_net;
  ParameterSet<float> t2m;
  ParameterSet<float> ssrn;

  static Synthesizer load(const Checkpoint& t2m_ckpt, const Checkpoint& ssrn_ckpt);

  /// Throws ErrorKind::kData if `text` uses characters the model never saw.
  SynthesisResult synthesize(const std::string& text, const SynthesisConfig& syn) const;
};

/// 8-bit binary PGM of the alignment, one pixel per (character, frame),
/// character 0 at the top.
void write_alignment_pgm(const std::filesystem::path& path, const DecodeResult& decode);

}  // namespace fullconv
