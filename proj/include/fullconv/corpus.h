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
#include <string>
#include <vector>

#include "fullconv/audio.h"
#include "fullconv/mel.h"
#include "fullconv/spectrogram.h"
#include "fullconv/stft.h"
#include "fullconv/text.h"

namespace fullconv {

struct FeatureConfig {
  StftConfig stft;
  std::size_t n_mels = 80;
  double f_min = 0.0;
  double f_max = 0.0;  // <= 0: Nyquist
  NormalizationConfig norm;
};

/// Mel frames kept per linear frame; SSRN undoes it with two 2x deconvolutions.
inline constexpr std::size_t kReduction = 4;

struct UtteranceFeatures {
  Spectrogram mel;     // reduced, normalized (Text2Mel input and SSRN coarse input)
  Spectrogram linear;  // normalized (SSRN target)
};

/// Normalized linear magnitudes plus the reduced, normalized mel.
UtteranceFeatures extract_features(const Waveform& wave, const FeatureConfig& config);

struct Utterance {
  std::string id;
  std::string text;
  std::vector<std::int32_t> char_ids;  // EOS terminated
  std::filesystem::path wav_path;
  Spectrogram mel;
  Spectrogram linear;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Utterance> utterances;
};

struct MetadataEntry {
  std::string id;
  std::string text;
  std::size_t line = 0;
};

/// `id|text` lines. Blank lines are skipped; ids must be unique and made of
/// [A-Za-z0-9_.-] since they name cache files.
std::vector<MetadataEntry> read_metadata(const std::filesystem::path& path);

/// Reads every WAV, extracts features and writes the prepared layout:
/// `<out>/metadata.csv`, `<out>/mel/<id>.mspec`, `<out>/linear/<id>.mspec`.
Corpus load_corpus(const std::filesystem::path& metadata, const std::filesystem::path& wav_dir,
                   const std::filesystem::path& out_dir, const FeatureConfig& config);

/// Loads a directory produced by load_corpus without touching audio.
Corpus load_prepared(const std::filesystem::path& dir);

/// Rebuilds ids after the vocabulary changes (e.g. a checkpoint's vocabulary).
void encode_corpus(Corpus& corpus);

}  // namespace fullconv
