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
#include <string>
#include <string_view>

#include "fullconv/corpus.h"
#include "fullconv/nets.h"
#include "fullconv/text.h"
#include "fullconv/trainer.h"

namespace fullconv {

struct SynthesisConfig {
  std::size_t max_frames = 0;  // 0: 4 N + 40
  bool forcing_enabled = true;
  std::size_t forcing_back = 1;
  std::size_t forcing_ahead = 3;
  double stop_threshold = 0.02;
  std::size_t stop_frames = 10;
  std::size_t gla_iterations = 60;

  void validate() const;
};

/// Every tunable, read from `section.key = value` lines (`#` starts a
/// comment). Unknown keys are errors.
struct RunConfig {
  FeatureConfig features;
  PlanOptions plan;
  TrainerConfig trainer;
  SynthesisConfig synth;
  std::string vocab;  // serialized Vocabulary; filled from the corpus when empty

  void validate() const;
};

/// Applies the assignments in `text` on top of `base`.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
/// Canonical text form; parse_run_config(render_run_config(c)) == c.
std::string render_run_config(const RunConfig& config);

NetworkConfig network_config(const RunConfig& config);

}  // namespace fullconv
