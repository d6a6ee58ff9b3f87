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

#include <filesystem>
#include <vector>

namespace fullconv {

struct Waveform {
  int sample_rate = 22050;
  std::vector<float> samples;  // nominally in [-1, 1]
};

/// Reads 16-bit PCM mono RIFF/WAVE, scaling samples by 1/32768.
/// Non-PCM, multi-channel, or malformed files raise ErrorKind::kFormat.
Waveform read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono with a canonical 44-byte header. Samples are
/// clipped to [-1, 1] and rounded at scale 32768, saturating at 32767.
void write_wav(const std::filesystem::path& path, const Waveform& wave);

}  // namespace fullconv
