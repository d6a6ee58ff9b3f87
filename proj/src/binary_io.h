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

// Little-endian primitive readers/writers shared by the WAV, MSPEC1 and
// checkpoint codecs.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "fullconv/error.h"

namespace fullconv::binary {

template <typename UInt>
void write_le(std::ostream& os, UInt value) {
  char bytes[sizeof(UInt)];
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  }
  os.write(bytes, sizeof(UInt));
}

inline void write_f32(std::ostream& os, float value) {
  write_le<std::uint32_t>(os, std::bit_cast<std::uint32_t>(value));
}

template <typename UInt>
UInt read_le(std::istream& is, const std::string& what) {
  unsigned char bytes[sizeof(UInt)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(UInt))) {
    fail(ErrorKind::kFormat, "truncated " + what);
  }
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(bytes[i]) << (8 * i);
  }
  return value;
}

inline float read_f32(std::istream& is, const std::string& what) {
  return std::bit_cast<float>(read_le<std::uint32_t>(is, what));
}

inline std::string read_bytes(std::istream& is, std::size_t count, const std::string& what) {
  std::string out(count, '\0');
  if (count && !is.read(out.data(), static_cast<std::streamsize>(count))) {
    fail(ErrorKind::kFormat, "truncated " + what);
  }
  return out;
}

}  // namespace fullconv::binary
