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

#include "fullconv/spectrogram.h"

#include <fstream>

#include "binary_io.h"
#include "fullconv/error.h"

namespace fullconv {

namespace {
constexpr char kMagic[] = "MSPEC1";
}

void write_mspec(const std::filesystem::path& path, const Spectrogram& spec) {
  if (spec.values.size() != spec.bins * spec.frames) {
    fail(ErrorKind::kShape, "write_mspec: value count does not match bins x frames");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot create spectrogram file " + path.string());
  out.write(kMagic, 6);
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.bins));
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(spec.frames));
  binary::write_le<std::uint8_t>(out, static_cast<std::uint8_t>(spec.kind));
  binary::write_le<std::uint8_t>(out, spec.normalized ? 1 : 0);
  for (float v : spec.values) binary::write_f32(out, v);
  if (!out) fail(ErrorKind::kIo, "failed writing spectrogram file " + path.string());
}

Spectrogram read_mspec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open spectrogram file " + path.string());
  const std::string where = "spectrogram file " + path.string();
  if (binary::read_bytes(in, 6, where) != kMagic) {
    fail(ErrorKind::kFormat, where + ": bad magic");
  }
  Spectrogram spec;
  spec.bins = binary::read_le<std::uint32_t>(in, where);
  spec.frames = binary::read_le<std::uint32_t>(in, where);
  const auto kind = binary::read_le<std::uint8_t>(in, where);
  const auto normalized = binary::read_le<std::uint8_t>(in, where);
  if (kind > 1) fail(ErrorKind::kFormat, where + ": unknown kind " + std::to_string(kind));
  if (normalized > 1) fail(ErrorKind::kFormat, where + ": bad normalized flag");
  spec.kind = static_cast<SpectrogramKind>(kind);
  spec.normalized = normalized == 1;
  spec.values.resize(spec.bins * spec.frames);
  for (auto& v : spec.values) v = binary::read_f32(in, where + " payload");
  if (in.peek() != std::char_traits<char>::eof()) {
    fail(ErrorKind::kFormat, where + ": trailing bytes after payload");
  }
  return spec;
}

}  // namespace fullconv
