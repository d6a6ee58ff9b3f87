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
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fullconv {

/// Decodes UTF-8; malformed input throws ErrorKind::kData.
std::u32string utf8_decode(std::string_view text);
std::string utf8_encode(std::u32string_view text);

/// Character inventory. Ids 0..2 are reserved; characters follow from 3 in
/// code point order.
class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kEos = 1;
  static constexpr std::int32_t kUnk = 2;
  static constexpr std::int32_t kFirstChar = 3;

  Vocabulary() = default;
  explicit Vocabulary(std::vector<char32_t> chars);

  static Vocabulary from_texts(const std::vector<std::string>& texts);

  std::size_t size() const { return chars_.size() + kFirstChar; }
  const std::vector<char32_t>& chars() const { return chars_; }
  /// kUnk for characters outside the inventory.
  std::int32_t id(char32_t c) const;
  char32_t character(std::int32_t id) const;

  /// Comma separated hex code points, e.g. "61,62,3b1".
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text);

  bool operator==(const Vocabulary& other) const { return chars_ == other.chars_; }

 private:
  std::vector<char32_t> chars_;
  std::map<char32_t, std::int32_t> index_;
};

/// Character ids followed by kEos.
std::vector<std::int32_t> encode_text(std::string_view text, const Vocabulary& vocab);

}  // namespace fullconv
