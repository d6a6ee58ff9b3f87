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

#include "fullconv/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fullconv/error.h"

namespace fullconv {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Num>
Num parse_number(std::string_view v, const std::string& key) {
  Num out{};
  auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size())
    fail(ErrorKind::kConfig, key + ": cannot parse '" + std::string(v) + "'");
  return out;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ErrorKind::kConfig, key + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<std::size_t> parse_list(std::string_view v, const std::string& key) {
  std::vector<std::size_t> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    out.push_back(parse_number<std::size_t>(trim(v.substr(0, comma)), key));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  if (out.empty()) fail(ErrorKind::kConfig, key + ": empty list");
  return out;
}

std::string render_list(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string render_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);  // shortest round-trip form
  return std::string(buf, end);
}

// One entry per key: a setter and a getter over the same field.
struct Field {
  std::function<void(RunConfig&, std::string_view, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Num, typename Access>
Field number_field(Access access) {
  return {[access](RunConfig& c, std::string_view v, const std::string& key) {
            access(c) = parse_number<Num>(v, key);
          },
          [access](const RunConfig& c) {
            if constexpr (std::is_floating_point_v<Num>) {
              return render_double(access(c));
            } else {
              return std::to_string(access(c));
            }
          }};
}

template <typename Access>
Field bool_field(Access access) {
  return {[access](RunConfig& c, std::string_view v, const std::string& key) { access(c) = parse_bool(v, key); },
          [access](const RunConfig& c) { return std::string(access(c) ? "true" : "false"); }};
}

template <typename Access>
Field list_field(Access access) {
  return {[access](RunConfig& c, std::string_view v, const std::string& key) { access(c) = parse_list(v, key); },
          [access](const RunConfig& c) { return render_list(access(c)); }};
}

#define FIELD(kind, type, expr) kind<type>([](auto& c) -> auto& { return expr; })
#define FLAG(expr) bool_field([](auto& c) -> auto& { return expr; })
#define LIST(expr) list_field([](auto& c) -> auto& { return expr; })

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = {
      {"dsp.sample_rate", FIELD(number_field, int, c.features.stft.sample_rate)},
      {"dsp.n_fft", FIELD(number_field, std::size_t, c.features.stft.n_fft)},
      {"dsp.hop_length", FIELD(number_field, std::size_t, c.features.stft.hop_length)},
      {"dsp.n_mels", FIELD(number_field, std::size_t, c.features.n_mels)},
      {"dsp.f_min", FIELD(number_field, double, c.features.f_min)},
      {"dsp.f_max", FIELD(number_field, double, c.features.f_max)},
      {"dsp.ref_db", FIELD(number_field, double, c.features.norm.ref_db)},
      {"dsp.min_db", FIELD(number_field, double, c.features.norm.min_db)},
      {"augment.time_warp", FIELD(number_field, std::size_t, c.trainer.augment.time_warp)},
      {"augment.freq_mask", FIELD(number_field, std::size_t, c.trainer.augment.freq_mask)},
      {"augment.time_mask", FIELD(number_field, std::size_t, c.trainer.augment.time_mask)},
      {"augment.n_freq_masks", FIELD(number_field, std::size_t, c.trainer.augment.n_freq_masks)},
      {"augment.n_time_masks", FIELD(number_field, std::size_t, c.trainer.augment.n_time_masks)},
      {"augment.mix_ratio", FIELD(number_field, double, c.trainer.augment.mix_ratio)},
      {"augment.mask_fill", FIELD(number_field, float, c.trainer.augment.mask_fill)},
      {"nets.e", FIELD(number_field, std::size_t, c.plan.e)},
      {"nets.d", FIELD(number_field, std::size_t, c.plan.d)},
      {"nets.c", FIELD(number_field, std::size_t, c.plan.c)},
      {"nets.kernel_size", FIELD(number_field, std::size_t, c.plan.kernel_size)},
      {"nets.dilations", LIST(c.plan.dilations)},
      {"nets.text_blocks", FIELD(number_field, std::size_t, c.plan.text_blocks)},
      {"nets.audio_encoder_blocks", FIELD(number_field, std::size_t, c.plan.audio_encoder_blocks)},
      {"nets.audio_decoder_blocks", FIELD(number_field, std::size_t, c.plan.audio_decoder_blocks)},
      {"nets.ssrn_dilations", LIST(c.plan.ssrn_dilations)},
      {"trainer.batch_size", FIELD(number_field, std::size_t, c.trainer.batch_size)},
      {"trainer.max_iterations", FIELD(number_field, std::uint64_t, c.trainer.max_iterations)},
      {"trainer.checkpoint_interval", FIELD(number_field, std::uint64_t, c.trainer.checkpoint_interval)},
      {"trainer.ssrn_crop", FIELD(number_field, std::size_t, c.trainer.ssrn_crop)},
      {"trainer.seed", FIELD(number_field, std::uint64_t, c.trainer.seed)},
      {"trainer.lambda_attn", FIELD(number_field, double, c.trainer.lambda_attn)},
      {"trainer.log_interval", FIELD(number_field, std::uint64_t, c.trainer.log_interval)},
      {"trainer.alpha", FIELD(number_field, double, c.trainer.adam.alpha)},
      {"trainer.beta1", FIELD(number_field, double, c.trainer.adam.beta1)},
      {"trainer.beta2", FIELD(number_field, double, c.trainer.adam.beta2)},
      {"trainer.epsilon", FIELD(number_field, double, c.trainer.adam.epsilon)},
      {"synth.max_frames", FIELD(number_field, std::size_t, c.synth.max_frames)},
      {"synth.forcing", FLAG(c.synth.forcing_enabled)},
      {"synth.forcing_back", FIELD(number_field, std::size_t, c.synth.forcing_back)},
      {"synth.forcing_ahead", FIELD(number_field, std::size_t, c.synth.forcing_ahead)},
      {"synth.stop_threshold", FIELD(number_field, double, c.synth.stop_threshold)},
      {"synth.stop_frames", FIELD(number_field, std::size_t, c.synth.stop_frames)},
      {"synth.gla_iterations", FIELD(number_field, std::size_t, c.synth.gla_iterations)},
      {"data.vocab",
       {[](RunConfig& c, std::string_view v, const std::string&) {
          c.vocab = std::string(v);
          Vocabulary::deserialize(c.vocab);  // validates
        },
        [](const RunConfig& c) { return c.vocab; }}},
  };
  return table;
}

#undef FIELD
#undef FLAG
#undef LIST

}  // namespace

void SynthesisConfig::validate() const {
  if (stop_frames == 0) fail(ErrorKind::kConfig, "synth.stop_frames must be positive");
  if (!(stop_threshold >= 0)) fail(ErrorKind::kConfig, "synth.stop_threshold must be non-negative");
  if (gla_iterations == 0) fail(ErrorKind::kConfig, "synth.gla_iterations must be positive");
}

void RunConfig::validate() const {
  trainer.validate();
  synth.validate();
  trainer.augment.validate(features.n_mels);
  if (features.stft.n_fft == 0 || features.stft.hop_length == 0 || features.stft.sample_rate <= 0)
    fail(ErrorKind::kConfig, "dsp: sample_rate, n_fft and hop_length must be positive");
  if (plan.e == 0 || plan.d == 0 || plan.c == 0 || plan.kernel_size == 0)
    fail(ErrorKind::kConfig, "nets: widths and kernel size must be positive");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no);
    if (eq == std::string_view::npos) fail(ErrorKind::kConfig, where + ": expected 'section.key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    auto it = fields().find(key);
    if (it == fields().end()) fail(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
    it->second.set(base, value, where + " (" + key + ")");
  }
  base.validate();
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), std::move(base));
}

std::string render_run_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

NetworkConfig network_config(const RunConfig& config) {
  if (config.vocab.empty()) fail(ErrorKind::kConfig, "network_config: vocabulary not set");
  PlanOptions o = config.plan;
  o.vocab_size = Vocabulary::deserialize(config.vocab).size();
  o.n_mels = config.features.n_mels;
  o.n_linear = config.features.stft.bins();
  return build_network_config(o);
}

}  // namespace fullconv
