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

#include "fullconv/augment.h"

#include <cmath>

#include "fullconv/error.h"

namespace fullconv {

void AugmentPolicy::validate(std::size_t bins) const {
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "augment: mix_ratio must lie in [0, 1]");
  }
  if (freq_mask >= bins) {
    fail(ErrorKind::kInvalidArgument, "augment: frequency mask width " +
                                          std::to_string(freq_mask) + " must be below " +
                                          std::to_string(bins) + " bins");
  }
}

Spectrogram warp_time_axis(const Spectrogram& spec, std::size_t anchor, long displacement) {
  if (spec.frames == 0) return spec;
  const long last = static_cast<long>(spec.frames) - 1;
  const long a = static_cast<long>(anchor);
  const long dest = a + displacement;
  if (a < 0 || a > last || dest < 0 || dest > last) {
    fail(ErrorKind::kInvalidArgument, "warp_time_axis: anchor " + std::to_string(anchor) +
                                          " displaced by " + std::to_string(displacement) +
                                          " leaves [0, " + std::to_string(last) + "]");
  }
  if (displacement == 0) return spec;

  Spectrogram out = spec;
  for (long j = 0; j <= last; ++j) {
    double src;
    if (j == 0 || j == last) {
      src = static_cast<double>(j);  // endpoints stay put even when a segment collapses
    } else if (j <= dest) {
      src = dest == 0 ? 0.0 : static_cast<double>(j * a) / static_cast<double>(dest);
    } else {
      src = static_cast<double>(a) + static_cast<double>((j - dest) * (last - a)) /
                                         static_cast<double>(last - dest);
    }
    const auto lo = static_cast<std::size_t>(std::floor(src));
    const double frac = src - static_cast<double>(lo);
    for (std::size_t b = 0; b < spec.bins; ++b) {
      float value = spec.at(b, lo);
      if (frac > 0.0 && lo + 1 < spec.frames) {
        value = static_cast<float>((1.0 - frac) * spec.at(b, lo) + frac * spec.at(b, lo + 1));
      }
      out.at(b, static_cast<std::size_t>(j)) = value;
    }
  }
  return out;
}

Spectrogram time_warp(const Spectrogram& spec, std::size_t max_warp, std::mt19937_64& rng) {
  if (spec.frames <= 2 * max_warp) {
    fail(ErrorKind::kInvalidArgument, "time_warp: " + std::to_string(spec.frames) +
                                          " frames cannot take a warp of " +
                                          std::to_string(max_warp));
  }
  if (max_warp == 0) return spec;
  std::uniform_int_distribution<std::size_t> anchor_dist(max_warp, spec.frames - 1 - max_warp);
  std::uniform_int_distribution<long> distance_dist(0, static_cast<long>(max_warp));
  std::bernoulli_distribution sign(0.5);
  const std::size_t anchor = anchor_dist(rng);
  const long distance = distance_dist(rng);
  return warp_time_axis(spec, anchor, sign(rng) ? distance : -distance);
}

Spectrogram mask_bins(const Spectrogram& spec, std::size_t first, std::size_t width, float fill) {
  if (first + width > spec.bins) {
    fail(ErrorKind::kInvalidArgument, "mask_bins: rows beyond the spectrogram");
  }
  Spectrogram out = spec;
  for (std::size_t b = first; b < first + width; ++b) {
    for (std::size_t t = 0; t < spec.frames; ++t) out.at(b, t) = fill;
  }
  return out;
}

Spectrogram mask_frames(const Spectrogram& spec, std::size_t first, std::size_t width, float fill) {
  if (first + width > spec.frames) {
    fail(ErrorKind::kInvalidArgument, "mask_frames: frames beyond the spectrogram");
  }
  Spectrogram out = spec;
  for (std::size_t b = 0; b < spec.bins; ++b) {
    for (std::size_t t = first; t < first + width; ++t) out.at(b, t) = fill;
  }
  return out;
}

Spectrogram freq_mask(const Spectrogram& spec, std::size_t max_width, std::mt19937_64& rng,
                      float fill) {
  if (max_width >= spec.bins) {
    fail(ErrorKind::kInvalidArgument, "freq_mask: width bound " + std::to_string(max_width) +
                                          " must be below " + std::to_string(spec.bins) + " bins");
  }
  const std::size_t width = std::uniform_int_distribution<std::size_t>(0, max_width)(rng);
  const std::size_t first = std::uniform_int_distribution<std::size_t>(0, spec.bins - width)(rng);
  return mask_bins(spec, first, width, fill);
}

Spectrogram time_mask(const Spectrogram& spec, std::size_t max_width, std::mt19937_64& rng,
                      float fill) {
  const std::size_t bound = std::min(max_width, spec.frames);
  const std::size_t width = std::uniform_int_distribution<std::size_t>(0, bound)(rng);
  const std::size_t first = std::uniform_int_distribution<std::size_t>(0, spec.frames - width)(rng);
  return mask_frames(spec, first, width, fill);
}

Spectrogram augment_utterance(const Spectrogram& spec, const AugmentPolicy& policy,
                              std::mt19937_64& rng) {
  policy.validate(spec.bins);
  Spectrogram out = spec;
  if (policy.time_warp > 0 && spec.frames > 2 * policy.time_warp) {
    out = time_warp(out, policy.time_warp, rng);
  }
  for (std::size_t i = 0; i < policy.n_freq_masks; ++i) {
    out = freq_mask(out, policy.freq_mask, rng, policy.mask_fill);
  }
  for (std::size_t i = 0; i < policy.n_time_masks; ++i) {
    out = time_mask(out, policy.time_mask, rng, policy.mask_fill);
  }
  return out;
}

std::size_t augmented_count(double mix_ratio, std::size_t batch_size) {
  return static_cast<std::size_t>(std::llround(mix_ratio * static_cast<double>(batch_size)));
}

}  // namespace fullconv
