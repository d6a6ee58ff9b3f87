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

#include "fullconv/text.h"

#include <algorithm>
#include <charconv>
#include <set>

#include "fullconv/error.h"

namespace fullconv {

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  std::size_t i = 0;
  auto bad = [&](const char* why) {
    fail(ErrorKind::kData, std::string("invalid UTF-8 at byte ") + std::to_string(i) + ": " + why);
  };
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t extra;
    char32_t cp;
    if (lead < 0x80) {
      extra = 0;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
    } else {
      bad("unexpected lead byte");
    }
    if (i + extra >= text.size() && extra > 0) bad("truncated sequence");
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) bad("missing continuation byte");
      cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr char32_t kMin[4] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra]) bad("overlong encoding");
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) bad("not a scalar value");
    out.push_back(cp);
    i += extra + 1;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<char32_t> chars) : chars_(std::move(chars)) {
  if (!std::is_sorted(chars_.begin(), chars_.end()) ||
      std::adjacent_find(chars_.begin(), chars_.end()) != chars_.end()) {
    fail(ErrorKind::kInvalidArgument, "vocabulary characters must be sorted and distinct");
  }
  for (std::size_t i = 0; i < chars_.size(); ++i)
    index_[chars_[i]] = static_cast<std::int32_t>(i) + kFirstChar;
}

Vocabulary Vocabulary::from_texts(const std::vector<std::string>& texts) {
  std::set<char32_t> seen;
  for (const auto& t : texts)
    for (char32_t c : utf8_decode(t)) seen.insert(c);
  return Vocabulary(std::vector<char32_t>(seen.begin(), seen.end()));
}

std::int32_t Vocabulary::id(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnk : it->second;
}

char32_t Vocabulary::character(std::int32_t id) const {
  if (id < kFirstChar || static_cast<std::size_t>(id) >= size())
    fail(ErrorKind::kInvalidArgument, "vocabulary: id " + std::to_string(id) + " is not a character");
  return chars_[static_cast<std::size_t>(id - kFirstChar)];
}

std::string Vocabulary::serialize() const {
  std::string out;
  char buf[16];
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (i) out.push_back(',');
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<std::uint32_t>(chars_[i]), 16);
    out.append(buf, end);
  }
  return out;
}

Vocabulary Vocabulary::deserialize(std::string_view text) {
  std::vector<char32_t> chars;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = text.substr(0, comma);
    std::uint32_t cp = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), cp, 16);
    if (ec != std::errc() || end != item.data() + item.size() || item.empty())
      fail(ErrorKind::kFormat, "vocabulary: bad code point '" + std::string(item) + "'");
    chars.push_back(static_cast<char32_t>(cp));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return Vocabulary(std::move(chars));
}

std::vector<std::int32_t> encode_text(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::int32_t> ids;
  for (char32_t c : utf8_decode(text)) ids.push_back(vocab.id(c));
  ids.push_back(Vocabulary::kEos);
  return ids;
}

}  // namespace fullconv
