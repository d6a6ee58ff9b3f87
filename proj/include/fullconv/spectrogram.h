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
#include <filesystem>
#include <vector>

namespace fullconv {

enum class SpectrogramKind : std::uint8_t { kMel = 0, kLinear = 1 };

/// Bin-major (bins x frames) real time-frequency matrix.
struct Spectrogram {
  SpectrogramKind kind = SpectrogramKind::kMel;
  std::size_t bins = 0;
  std::size_t frames = 0;
  std::vector<float> values;
  bool normalized = false;
  bool reduced = false;  // time-decimated; not persisted by MSPEC1

  Spectrogram() = default;
  Spectrogram(SpectrogramKind k, std::size_t b, std::size_t f, float fill = 0.0f)
      : kind(k), bins(b), frames(f), values(b * f, fill) {}

  float& at(std::size_t bin, std::size_t frame) { return values[bin * frames + frame]; }
  float at(std::size_t bin, std::size_t frame) const { return values[bin * frames + frame]; }
};

/// MSPEC1: magic "MSPEC1", u32 bins, u32 frames, u8 kind, u8 normalized,
/// then bins*frames little-endian f32 values, bin-major.
void write_mspec(const std::filesystem::path& path, const Spectrogram& spec);
Spectrogram read_mspec(const std::filesystem::path& path);

}  // namespace fullconv
