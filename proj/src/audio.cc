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

#include "fullconv/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "binary_io.h"
#include "fullconv/error.h"

namespace fullconv {

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open WAV file " + path.string());
  const std::string where = "WAV file " + path.string();

  if (binary::read_bytes(in, 4, where) != "RIFF") {
    fail(ErrorKind::kFormat, where + ": missing RIFF tag");
  }
  binary::read_le<std::uint32_t>(in, where);
  if (binary::read_bytes(in, 4, where) != "WAVE") {
    fail(ErrorKind::kFormat, where + ": missing WAVE tag");
  }

  bool have_format = false;
  std::uint32_t sample_rate = 0;
  while (true) {
    const std::string id = binary::read_bytes(in, 4, where + " chunk header");
    const std::uint32_t size = binary::read_le<std::uint32_t>(in, where + " chunk size");
    if (id == "fmt ") {
      if (size < 16) fail(ErrorKind::kFormat, where + ": fmt chunk too short");
      const auto format = binary::read_le<std::uint16_t>(in, where);
      const auto channels = binary::read_le<std::uint16_t>(in, where);
      sample_rate = binary::read_le<std::uint32_t>(in, where);
      binary::read_le<std::uint32_t>(in, where);  // byte rate
      binary::read_le<std::uint16_t>(in, where);  // block align
      const auto bits = binary::read_le<std::uint16_t>(in, where);
      binary::read_bytes(in, size - 16 + (size & 1), where);
      if (format != 1) {
        fail(ErrorKind::kFormat, where + ": audio format " + std::to_string(format) +
                                     " is not PCM");
      }
      if (channels != 1) {
        fail(ErrorKind::kFormat, where + ": " + std::to_string(channels) +
                                     " channels, only mono is supported");
      }
      if (bits != 16) {
        fail(ErrorKind::kFormat, where + ": " + std::to_string(bits) +
                                     "-bit samples, only 16-bit is supported");
      }
      if (sample_rate == 0) fail(ErrorKind::kFormat, where + ": zero sample rate");
      have_format = true;
    } else if (id == "data") {
      if (!have_format) fail(ErrorKind::kFormat, where + ": data chunk before fmt chunk");
      if (size % 2) fail(ErrorKind::kFormat, where + ": odd data chunk size");
      Waveform wave;
      wave.sample_rate = static_cast<int>(sample_rate);
      wave.samples.resize(size / 2);
      for (auto& s : wave.samples) {
        const auto raw = static_cast<std::int16_t>(binary::read_le<std::uint16_t>(in, where + " samples"));
        s = static_cast<float>(raw) / 32768.0f;
      }
      return wave;
    } else {
      binary::read_bytes(in, size + (size & 1), where);
    }
  }
}

void write_wav(const std::filesystem::path& path, const Waveform& wave) {
  if (wave.sample_rate <= 0) {
    fail(ErrorKind::kInvalidArgument, "write_wav: sample rate must be positive");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot create WAV file " + path.string());
  const auto data_bytes = static_cast<std::uint32_t>(wave.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(wave.sample_rate);
  out.write("RIFF", 4);
  binary::write_le<std::uint32_t>(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  binary::write_le<std::uint32_t>(out, 16);
  binary::write_le<std::uint16_t>(out, 1);
  binary::write_le<std::uint16_t>(out, 1);
  binary::write_le<std::uint32_t>(out, rate);
  binary::write_le<std::uint32_t>(out, rate * 2);
  binary::write_le<std::uint16_t>(out, 2);
  binary::write_le<std::uint16_t>(out, 16);
  out.write("data", 4);
  binary::write_le<std::uint32_t>(out, data_bytes);
  for (float s : wave.samples) {
    if (!std::isfinite(s)) fail(ErrorKind::kNumeric, "write_wav: non-finite sample");
    const double clipped = std::clamp(static_cast<double>(s), -1.0, 1.0);
    const double scaled = std::clamp(std::round(clipped * 32768.0), -32768.0, 32767.0);
    binary::write_le<std::uint16_t>(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  if (!out) fail(ErrorKind::kIo, "failed writing WAV file " + path.string());
}

}  // namespace fullconv
