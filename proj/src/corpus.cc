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

#include "fullconv/corpus.h"

#include <fstream>
#include <set>

#include "fullconv/error.h"

namespace fullconv {
namespace {

bool valid_id(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  for (char ch : id) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

void check_features(const Utterance& u) {
  if (u.mel.kind != SpectrogramKind::kMel || u.linear.kind != SpectrogramKind::kLinear)
    fail(ErrorKind::kData, u.id + ": cached spectrogram kinds are swapped");
  if (u.mel.frames * kReduction + 3 < u.linear.frames)
    fail(ErrorKind::kData, u.id + ": mel has too few frames for the linear target");
}

}  // namespace

UtteranceFeatures extract_features(const Waveform& wave, const FeatureConfig& config) {
  if (wave.sample_rate != config.stft.sample_rate) {
    fail(ErrorKind::kData, "sample rate " + std::to_string(wave.sample_rate) + " differs from configured " +
                               std::to_string(config.stft.sample_rate));
  }
  const auto bank = build_mel_filterbank(config.stft.sample_rate, config.stft.n_fft, config.n_mels,
                                         config.f_min, config.f_max);
  const auto linear = magnitude(stft(wave, config.stft));
  UtteranceFeatures out;
  out.mel = reduce_frames(normalize(apply_filterbank(bank, linear), config.norm), kReduction);
  out.linear = normalize(linear, config.norm);
  return out;
}

std::vector<MetadataEntry> read_metadata(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open metadata " + path.string());
  std::vector<MetadataEntry> entries;
  std::set<std::string> seen;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path.filename().string() + ":" + std::to_string(number);
    const auto bar = line.find('|');
    if (bar == std::string::npos) fail(ErrorKind::kData, where + ": expected 'id|text'");
    MetadataEntry e{line.substr(0, bar), line.substr(bar + 1), number};
    if (!valid_id(e.id)) fail(ErrorKind::kData, where + ": bad utterance id '" + e.id + "'");
    if (!seen.insert(e.id).second) fail(ErrorKind::kData, where + ": duplicate id '" + e.id + "'");
    utf8_decode(e.text);  // validates
    entries.push_back(std::move(e));
  }
  if (entries.empty()) fail(ErrorKind::kData, "metadata " + path.string() + " has no utterances");
  return entries;
}

void encode_corpus(Corpus& corpus) {
  for (auto& u : corpus.utterances) u.char_ids = encode_text(u.text, corpus.vocab);
}

Corpus load_corpus(const std::filesystem::path& metadata, const std::filesystem::path& wav_dir,
                   const std::filesystem::path& out_dir, const FeatureConfig& config) {
  const auto entries = read_metadata(metadata);
  for (const auto& e : entries) {
    if (!std::filesystem::is_regular_file(wav_dir / (e.id + ".wav")))
      fail(ErrorKind::kData, metadata.filename().string() + ":" + std::to_string(e.line) +
                                 ": missing " + (wav_dir / (e.id + ".wav")).string());
  }
  std::filesystem::create_directories(out_dir / "mel");
  std::filesystem::create_directories(out_dir / "linear");

  Corpus corpus;
  std::vector<std::string> texts;
  for (const auto& e : entries) texts.push_back(e.text);
  corpus.vocab = Vocabulary::from_texts(texts);

  std::ofstream meta(out_dir / "metadata.csv", std::ios::binary);
  if (!meta) fail(ErrorKind::kIo, "cannot write " + (out_dir / "metadata.csv").string());
  for (const auto& e : entries) {
    Utterance u;
    u.id = e.id;
    u.text = e.text;
    u.wav_path = wav_dir / (e.id + ".wav");
    auto features = extract_features(read_wav(u.wav_path), config);
    u.mel = std::move(features.mel);
    u.linear = std::move(features.linear);
    check_features(u);
    write_mspec(out_dir / "mel" / (e.id + ".mspec"), u.mel);
    write_mspec(out_dir / "linear" / (e.id + ".mspec"), u.linear);
    meta << e.id << '|' << e.text << '\n';
    corpus.utterances.push_back(std::move(u));
  }
  if (!meta) fail(ErrorKind::kIo, "failed writing " + (out_dir / "metadata.csv").string());
  encode_corpus(corpus);
  return corpus;
}

Corpus load_prepared(const std::filesystem::path& dir) {
  const auto entries = read_metadata(dir / "metadata.csv");
  Corpus corpus;
  std::vector<std::string> texts;
  for (const auto& e : entries) texts.push_back(e.text);
  corpus.vocab = Vocabulary::from_texts(texts);
  for (const auto& e : entries) {
    Utterance u;
    u.id = e.id;
    u.text = e.text;
    u.mel = read_mspec(dir / "mel" / (e.id + ".mspec"));
    u.linear = read_mspec(dir / "linear" / (e.id + ".mspec"));
    check_features(u);
    corpus.utterances.push_back(std::move(u));
  }
  encode_corpus(corpus);
  return corpus;
}

}  // namespace fullconv
