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
#include <random>

#include "fullconv/spectrogram.h"

namespace fullconv {

/// SpecAugment settings for normalized (reduced) mel spectrograms.
struct AugmentPolicy {
  std::size_t time_warp = 5;    // W: max warp distance in frames
  std::size_t freq_mask = 15;   // F: max masked bin count
  std::size_t time_mask = 20;   // max masked frame count
  std::size_t n_freq_masks = 1;
  std::size_t n_time_masks = 1;
  double mix_ratio = 0.5;       // fraction of each batch replaced by augmented items
  float mask_fill = 0.0f;

  /// Throws ErrorKind::kInvalidArgument when inconsistent with `bins`.
  void validate(std::size_t bins = 80) const;
};

/// Piecewise-linear remap of the time axis moving frame `anchor` to
/// `anchor + displacement` with both endpoints fixed; rows are resampled by
/// linear interpolation.
Spectrogram warp_time_axis(const Spectrogram& spec, std::size_t anchor, long displacement);

/// Random warp: anchor ~ U{W..frames-1-W}, |displacement| ~ U{0..W}, random sign.
/// Requires frames > 2W.
Spectrogram time_warp(const Spectrogram& spec, std::size_t max_warp, std::mt19937_64& rng);

/// Sets bins [first, first + width) to `fill`.
Spectrogram mask_bins(const Spectrogram& spec, std::size_t first, std::size_t width, float fill);
/// Sets frames [first, first + width) to `fill`.
Spectrogram mask_frames(const Spectrogram& spec, std::size_t first, std::size_t width, float fill);

/// width ~ U{0..max_width}, first ~ U{0..bins-width}. max_width must be < bins.
Spectrogram freq_mask(const Spectrogram& spec, std::size_t max_width, std::mt19937_64& rng,
                      float fill = 0.0f);
/// width ~ U{0..min(max_width, frames)}, first ~ U{0..frames-width}.
Spectrogram time_mask(const Spectrogram& spec, std::size_t max_width, std::mt19937_64& rng,
                      float fill = 0.0f);

/// Time warp (skipped when the utterance has <= 2W frames), then the
/// frequency masks, then the time masks.
Spectrogram augment_utterance(const Spectrogram& spec, const AugmentPolicy& policy,
                              std::mt19937_64& rng);

/// round(mix_ratio * batch_size).
std::size_t augmented_count(double mix_ratio, std::size_t batch_size);

}  // namespace fullconv
