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
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fullconv/adam.h"
#include "fullconv/augment.h"
#include "fullconv/checkpoint.h"
#include "fullconv/corpus.h"
#include "fullconv/nets.h"
#include "fullconv/params.h"

namespace fullconv {

/// Text2Mel minibatch. Mels are zero padded to t_max; ids are padded with PAD
/// but the trainer encodes only the valid prefix, so padding never reaches
/// the attention.
struct Batch {
  std::size_t n_max = 0;
  std::size_t t_max = 0;
  std::vector<std::size_t> source;  // corpus indices
  std::vector<std::vector<std::int32_t>> char_ids;
  std::vector<std::size_t> text_lengths;
  std::vector<std::size_t> frame_lengths;
  std::vector<Spectrogram> inputs;   // decoder-side mels (augmented items differ)
  std::vector<Spectrogram> targets;  // clean mels
  std::vector<bool> augmented;

  std::size_t size() const { return source.size(); }
  /// 0/1 mask over (bins x t_max) cells of item i.
  Tensor<float> cell_mask(std::size_t i) const;
};

/// Builds a batch from explicit corpus indices; round(mix_ratio * B)
/// randomly chosen items get an augmented decoder input.
Batch make_batch(const Corpus& corpus, const std::vector<std::size_t>& indices,
                 std::mt19937_64& rng, const AugmentPolicy& policy);

/// Samples `batch_size` utterances (without replacement when the corpus is
/// large enough) and calls the overload above.
Batch make_batch(const Corpus& corpus, std::size_t batch_size, std::mt19937_64& rng,
                 const AugmentPolicy& policy);

struct T2mMetrics {
  double l_hiera = 0;
  double l1 = 0;
  double l_attn = 0;
  double total = 0;
};

/// Teacher forcing: the decoder sees shift_right(S) (a zero first frame) and
/// is scored against S over valid frames. One Adam update.
T2mMetrics train_step_t2m(const Batch& batch, ParameterSet<float>& params,
                          const NetworkConfig& cfg, AdamState<float>& opt, double lambda_attn);

/// Aligned SSRN training pair: linear_start = 4 mel_start and
/// linear_frames = 4 mel_frames; target frames past the utterance are masked.
struct SsrnCrop {
  std::size_t source = 0;
  std::size_t mel_start = 0;
  std::size_t mel_frames = 0;
  std::size_t linear_start = 0;
  std::size_t linear_frames = 0;
  Tensor<float> mel;     // n_mels x mel_frames
  Tensor<float> target;  // n_linear x linear_frames
  Tensor<float> mask;    // same shape as target
};

/// `crop` counts linear frames and must be a multiple of 4. Utterances that
/// are too short are used whole.
SsrnCrop make_ssrn_crop(const Corpus& corpus, std::size_t index, std::size_t crop,
                        std::mt19937_64& rng);

struct SsrnMetrics {
  double l_hiera = 0;
  double l1 = 0;
};

SsrnMetrics train_step_ssrn(const std::vector<SsrnCrop>& crops, ParameterSet<float>& params,
                            const NetworkConfig& cfg, AdamState<float>& opt);

enum class Stage { kText2Mel, kSsrn };

const char* stage_name(Stage stage);

struct TrainerConfig {
  std::size_t batch_size = 16;
  std::uint64_t max_iterations = 200000;
  std::uint64_t checkpoint_interval = 2000;
  std::size_t ssrn_crop = 64;
  std::uint64_t seed = 1;
  double lambda_attn = 1.0;
  std::uint64_t log_interval = 100;
  AugmentPolicy augment;
  AdamConfig adam;

  void validate() const;
};

struct LoopEvent {
  Stage stage;
  std::uint64_t iteration;
  T2mMetrics t2m;    // Text2Mel runs
  SsrnMetrics ssrn;  // SSRN runs
  const ParameterSet<float>& params;
};

/// Return false to stop after the current iteration.
using LoopObserver = std::function<bool(const LoopEvent&)>;

/// Generator for iteration `iteration` of a run. Depends on nothing else, so
/// a resumed run replays exactly the batches of an uninterrupted one.
std::mt19937_64 iteration_rng(std::uint64_t seed, Stage stage, std::uint64_t iteration);

/// Initial parameters for a stage, seeded from the trainer seed.
ParameterSet<float> initial_parameters(const NetworkConfig& cfg, Stage stage, std::uint64_t seed);

/// Checkpoint file name for an iteration, e.g. "t2m-00002000.fctts".
std::string checkpoint_file_name(Stage stage, std::uint64_t iteration);

/// Runs iterations until max_iterations (or the observer stops it), writing a
/// checkpoint every checkpoint_interval iterations and one at exit into
/// `out_dir` (skipped when empty). `resume` continues a previous run.
Checkpoint train_loop(const Corpus& corpus, const NetworkConfig& cfg, const TrainerConfig& tc,
                      Stage stage, const std::filesystem::path& out_dir,
                      const std::string& config_echo, const Checkpoint* resume = nullptr,
                      const LoopObserver& observer = {});

}  // namespace fullconv
