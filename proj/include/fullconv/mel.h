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

#include "fullconv/audio.h"
#include "fullconv/spectrogram.h"
#include "fullconv/stft.h"

namespace fullconv {

/// HTK mel scale: 2595 * log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular filters with centers uniformly spaced on the HTK mel scale.
/// Each row is scaled so that its largest weight is exactly 1.
struct MelFilterbank {
  std::size_t n_mels = 0;
  std::size_t n_bins = 0;
  double f_min = 0.0;
  double f_max = 0.0;
  std::vector<double> center_hz;  // n_mels, strictly increasing
  std::vector<double> weights;    // n_mels x n_bins, row-major

  double at(std::size_t mel, std::size_t bin) const { return weights[mel * n_bins + bin]; }
};

/// f_max <= 0 selects sample_rate / 2.
MelFilterbank build_mel_filterbank(int sample_rate = 22050, std::size_t n_fft = 1024,
                                   std::size_t n_mels = 80, double f_min = 0.0,
                                   double f_max = 0.0);

/// filterbank * linear magnitudes.
Spectrogram apply_filterbank(const MelFilterbank& bank, const Spectrogram& linear);

/// filterbank * |STFT(w)| -- unreduced, unnormalized.
Spectrogram mel_spectrogram(const Waveform& wave, const MelFilterbank& bank,
                            const StftConfig& config = {});

struct NormalizationConfig {
  double ref_db = 20.0;
  double min_db = -100.0;
  double floor = 1e-5;
};

/// v -> clip((20 log10(max(v, floor)) - ref_db - min_db) / -min_db, 0, 1).
Spectrogram normalize(const Spectrogram& spec, const NormalizationConfig& config = {});
/// Inverse of normalize() on its unclipped band.
Spectrogram denormalize(const Spectrogram& spec, const NormalizationConfig& config = {});

/// Keeps frames 0, r, 2r, ...; output has ceil(frames / r) frames.
Spectrogram reduce_frames(const Spectrogram& spec, std::size_t factor = 4);

}  // namespace fullconv
