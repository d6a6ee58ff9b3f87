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

#include "fullconv/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "fullconv/error.h"
#include "fullconv/losses.h"
#include "fullconv/ops.h"

namespace fullconv {
namespace {

Spectrogram pad_frames(const Spectrogram& s, std::size_t frames) {
  Spectrogram out(s.kind, s.bins, frames, 0.0f);
  out.normalized = s.normalized;
  out.reduced = s.reduced;
  for (std::size_t b = 0; b < s.bins; ++b)
    std::copy_n(s.values.begin() + b * s.frames, s.frames, out.values.begin() + b * frames);
  return out;
}

Tensor<float> to_tensor(const Spectrogram& s) {
  return Tensor<float>::from_data({s.bins, s.frames}, s.values);
}

void check_metric(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::kNumeric, std::string(what) + " is not finite");
}

}  // namespace

Tensor<float> Batch::cell_mask(std::size_t i) const {
  const auto& s = targets.at(i);
  std::vector<float> m(s.bins * t_max, 0.0f);
  for (std::size_t b = 0; b < s.bins; ++b)
    std::fill_n(m.begin() + b * t_max, frame_lengths[i], 1.0f);
  return Tensor<float>::from_data({s.bins, t_max}, std::move(m));
}

Batch make_batch(const Corpus& corpus, const std::vector<std::size_t>& indices,
                 std::mt19937_64& rng, const AugmentPolicy& policy) {
  if (indices.empty()) fail(ErrorKind::kInvalidArgument, "make_batch: empty batch");
  policy.validate(corpus.utterances.empty() ? 80 : corpus.utterances.front().mel.bins);
  Batch batch;
  for (std::size_t idx : indices) {
    if (idx >= corpus.utterances.size()) fail(ErrorKind::kInvalidArgument, "make_batch: index out of range");
    const auto& u = corpus.utterances[idx];
    batch.n_max = std::max(batch.n_max, u.char_ids.size());
    batch.t_max = std::max(batch.t_max, u.mel.frames);
  }
  const std::size_t n_aug = augmented_count(policy.mix_ratio, indices.size());
  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> augment(indices.size(), false);
  for (std::size_t k = 0; k < n_aug; ++k) augment[order[k]] = true;

  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& u = corpus.utterances[indices[i]];
    auto ids = u.char_ids;
    batch.text_lengths.push_back(ids.size());
    ids.resize(batch.n_max, Vocabulary::kPad);
    batch.char_ids.push_back(std::move(ids));
    batch.frame_lengths.push_back(u.mel.frames);
    batch.source.push_back(indices[i]);
    batch.targets.push_back(pad_frames(u.mel, batch.t_max));
    batch.inputs.push_back(pad_frames(augment[i] ? augment_utterance(u.mel, policy, rng) : u.mel,
                                      batch.t_max));
    batch.augmented.push_back(augment[i]);
  }
  return batch;
}

Batch make_batch(const Corpus& corpus, std::size_t batch_size, std::mt19937_64& rng,
                 const AugmentPolicy& policy) {
  const std::size_t n = corpus.utterances.size();
  if (n == 0) fail(ErrorKind::kData, "make_batch: empty corpus");
  if (batch_size == 0) fail(ErrorKind::kInvalidArgument, "make_batch: batch size is zero");
  std::vector<std::size_t> indices;
  if (batch_size <= n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    indices.assign(all.begin(), all.begin() + static_cast<long>(batch_size));
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t i = 0; i < batch_size; ++i) indices.push_back(pick(rng));
  }
  return make_batch(corpus, indices, rng, policy);
}

T2mMetrics train_step_t2m(const Batch& batch, ParameterSet<float>& params,
                          const NetworkConfig& cfg, AdamState<float>& opt, double lambda_attn) {
  if (batch.size() == 0) fail(ErrorKind::kInvalidArgument, "train_step_t2m: empty batch");
  params.zero_grad();
  const float inv_b = 1.0f / static_cast<float>(batch.size());
  Tensor<float> total;
  T2mMetrics m;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t n = batch.text_lengths[i], t = batch.frame_lengths[i];
    std::span<const std::int32_t> ids(batch.char_ids[i].data(), n);
    auto target = to_tensor(batch.targets[i]);
    auto out = text2mel_forward(params, cfg, ids, shift_right(to_tensor(batch.inputs[i])));
    auto mask = batch.cell_mask(i);
    auto hiera = l_hiera(out.logits, target, &mask);
    auto attn = guided_attention_loss(out.alignment, guided_weights(n, t).as_tensor<float>(batch.t_max),
                                      static_cast<double>(n * t));
    auto item = lambda_attn == 0 ? hiera : add(hiera, scale(attn, static_cast<float>(lambda_attn)));
    item = scale(item, inv_b);
    total = total.defined() ? add(total, item) : item;
    {
      NoGradGuard guard;
      m.l_hiera += hiera.item() * inv_b;
      m.l1 += l1_term(out.logits, target, &mask).item() * inv_b;
      m.l_attn += attn.item() * inv_b;
    }
  }
  m.total = total.item();
  check_metric(m.total, "Text2Mel loss");
  total.backward();
  adam_step(params, opt);
  return m;
}

SsrnCrop make_ssrn_crop(const Corpus& corpus, std::size_t index, std::size_t crop,
                        std::mt19937_64& rng) {
  if (crop < 8 || crop % kReduction != 0)
    fail(ErrorKind::kConfig, "ssrn crop must be a multiple of 4 and at least 8");
  const auto& u = corpus.utterances.at(index);
  const std::size_t want = crop / kReduction;
  SsrnCrop c;
  c.source = index;
  c.mel_frames = std::min(want, u.mel.frames);
  std::uniform_int_distribution<std::size_t> start(0, u.mel.frames - c.mel_frames);
  c.mel_start = start(rng);
  c.linear_start = kReduction * c.mel_start;
  c.linear_frames = kReduction * c.mel_frames;

  std::vector<float> mel(u.mel.bins * c.mel_frames);
  for (std::size_t b = 0; b < u.mel.bins; ++b)
    for (std::size_t f = 0; f < c.mel_frames; ++f) mel[b * c.mel_frames + f] = u.mel.at(b, c.mel_start + f);
  std::vector<float> lin(u.linear.bins * c.linear_frames, 0.0f), mask(lin.size(), 0.0f);
  for (std::size_t b = 0; b < u.linear.bins; ++b) {
    for (std::size_t f = 0; f < c.linear_frames; ++f) {
      const std::size_t src = c.linear_start + f;
      if (src >= u.linear.frames) break;
      lin[b * c.linear_frames + f] = u.linear.at(b, src);
      mask[b * c.linear_frames + f] = 1.0f;
    }
  }
  c.mel = Tensor<float>::from_data({u.mel.bins, c.mel_frames}, std::move(mel));
  c.target = Tensor<float>::from_data({u.linear.bins, c.linear_frames}, std::move(lin));
  c.mask = Tensor<float>::from_data({u.linear.bins, c.linear_frames}, std::move(mask));
  return c;
}

SsrnMetrics train_step_ssrn(const std::vector<SsrnCrop>& crops, ParameterSet<float>& params,
                            const NetworkConfig& cfg, AdamState<float>& opt) {
  if (crops.empty()) fail(ErrorKind::kInvalidArgument, "train_step_ssrn: empty batch");
  params.zero_grad();
  const float inv_b = 1.0f / static_cast<float>(crops.size());
  Tensor<float> total;
  SsrnMetrics m;
  for (const auto& c : crops) {
    auto logits = ssrn_forward(params, cfg, c.mel);
    auto item = scale(l_hiera(logits, c.target, &c.mask), inv_b);
    total = total.defined() ? add(total, item) : item;
    NoGradGuard guard;
    m.l1 += l1_term(logits, c.target, &c.mask).item() * inv_b;
  }
  m.l_hiera = total.item();
  check_metric(m.l_hiera, "SSRN loss");
  total.backward();
  adam_step(params, opt);
  return m;
}

const char* stage_name(Stage stage) { return stage == Stage::kText2Mel ? "t2m" : "ssrn"; }

void TrainerConfig::validate() const {
  if (batch_size == 0) fail(ErrorKind::kConfig, "trainer.batch_size must be positive");
  if (checkpoint_interval == 0) fail(ErrorKind::kConfig, "trainer.checkpoint_interval must be positive");
  if (ssrn_crop < 8 || ssrn_crop % kReduction != 0)
    fail(ErrorKind::kConfig, "trainer.ssrn_crop must be a multiple of 4 and at least 8");
  if (!(lambda_attn >= 0)) fail(ErrorKind::kConfig, "trainer.lambda_attn must be non-negative");
  if (!(adam.alpha > 0) || !(adam.epsilon > 0) || !(adam.beta1 >= 0 && adam.beta1 < 1) ||
      !(adam.beta2 >= 0 && adam.beta2 < 1))
    fail(ErrorKind::kConfig, "trainer: invalid Adam hyperparameters");
  augment.validate();
}

std::mt19937_64 iteration_rng(std::uint64_t seed, Stage stage, std::uint64_t iteration) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage == Stage::kText2Mel ? 1 : 2),
                    static_cast<std::uint32_t>(iteration),
                    static_cast<std::uint32_t>(iteration >> 32)};
  return std::mt19937_64(seq);
}

ParameterSet<float> initial_parameters(const NetworkConfig& cfg, Stage stage, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stage == Stage::kText2Mel ? 11 : 12)};
  std::mt19937_64 rng(seq);
  return stage == Stage::kText2Mel ? init_text2mel<float>(cfg, rng) : init_ssrn<float>(cfg, rng);
}

std::string checkpoint_file_name(Stage stage, std::uint64_t iteration) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%08llu.fctts", stage_name(stage),
                static_cast<unsigned long long>(iteration));
  return buf;
}

Checkpoint train_loop(const Corpus& corpus, const NetworkConfig& cfg, const TrainerConfig& tc,
                      Stage stage, const std::filesystem::path& out_dir,
                      const std::string& config_echo, const Checkpoint* resume,
                      const LoopObserver& observer) {
  tc.validate();
  cfg.validate();
  if (corpus.utterances.empty()) fail(ErrorKind::kData, "train_loop: empty corpus");
  if (cfg.vocab_size != corpus.vocab.size())
    fail(ErrorKind::kConfig, "train_loop: network vocabulary size differs from the corpus");
  auto params = initial_parameters(cfg, stage, tc.seed);
  AdamState<float> opt;
  opt.config = tc.adam;
  std::uint64_t iteration = 0;
  if (resume) {
    restore_checkpoint(*resume, params, &opt);
    iteration = resume->iteration;
  }
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  auto snapshot = [&] {
    return make_checkpoint(params, opt, iteration, config_echo);
  };
  std::uint64_t last_saved = resume ? resume->iteration : UINT64_MAX;
  bool keep_going = true;
  while (keep_going && iteration < tc.max_iterations) {
    ++iteration;
    auto rng = iteration_rng(tc.seed, stage, iteration);
    T2mMetrics t2m;
    SsrnMetrics ssrn;
    if (stage == Stage::kText2Mel) {
      auto batch = make_batch(corpus, tc.batch_size, rng, tc.augment);
      t2m = train_step_t2m(batch, params, cfg, opt, tc.lambda_attn);
    } else {
      // Augmentation is Text2Mel only: masks would break the mel/linear pairing.
      const std::size_t n = corpus.utterances.size();
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      std::vector<SsrnCrop> crops;
      for (std::size_t b = 0; b < tc.batch_size; ++b)
        crops.push_back(make_ssrn_crop(corpus, pick(rng), tc.ssrn_crop, rng));
      ssrn = train_step_ssrn(crops, params, cfg, opt);
    }
    if (observer) keep_going = observer(LoopEvent{stage, iteration, t2m, ssrn, params});
    if (!out_dir.empty() && iteration % tc.checkpoint_interval == 0) {
      save_checkpoint(out_dir / checkpoint_file_name(stage, iteration), snapshot());
      last_saved = iteration;
    }
  }
  auto final_ckpt = snapshot();
  if (!out_dir.empty() && last_saved != iteration)
    save_checkpoint(out_dir / checkpoint_file_name(stage, iteration), final_ckpt);
  return final_ckpt;
}

}  // namespace fullconv
