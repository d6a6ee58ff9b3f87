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

#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "fullconv/checkpoint.h"
#include "fullconv/error.h"
#include "fullconv/ops.h"
#include "fullconv/trainer.h"
#include "support/synthetic_corpus.h"
#include "support/toy_models.h"

namespace fullconv {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("fullconv_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

AugmentPolicy no_augment() {
  AugmentPolicy p;
  p.mix_ratio = 0.0;
  return p;
}

bool same_values(const ParameterSet<float>& a, const ParameterSet<float>& b) {
  if (a.names() != b.names()) return false;
  for (const auto& [name, t] : a) {
    auto x = t.data(), y = b.at(name).data();
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

TEST(MakeBatchTest, SingleItemHasNoPadding) {
  auto corpus = testing::synthetic_aligned_corpus(3, 1);
  std::mt19937_64 rng(1);
  auto batch = make_batch(corpus, std::vector<std::size_t>{1}, rng, no_augment());
  EXPECT_EQ(batch.t_max, corpus.utterances[1].mel.frames);
  EXPECT_EQ(batch.n_max, corpus.utterances[1].char_ids.size());
  for (float m : batch.cell_mask(0).data()) EXPECT_EQ(m, 1.0f);
  EXPECT_EQ(batch.inputs[0].values, corpus.utterances[1].mel.values);
}

TEST(MakeBatchTest, LengthsThreeAndFivePadTwoFrames) {
  Corpus corpus;
  corpus.vocab = Vocabulary({U'a'});
  for (std::size_t frames : {3u, 5u}) {
    Utterance u;
    u.id = "u" + std::to_string(frames);
    u.text = std::string(frames - 1, 'a');
    u.char_ids = encode_text(u.text, corpus.vocab);
    u.mel = Spectrogram(SpectrogramKind::kMel, 80, frames, 0.5f);
    corpus.utterances.push_back(u);
  }
  std::mt19937_64 rng(2);
  auto batch = make_batch(corpus, std::vector<std::size_t>{0, 1}, rng, no_augment());
  EXPECT_EQ(batch.t_max, 5u);
  EXPECT_EQ(batch.n_max, 5u);
  auto mask = batch.cell_mask(0);
  std::size_t masked = 0;
  for (std::size_t t = 0; t < 5; ++t) masked += mask.at(0, t) == 0.0f;
  EXPECT_EQ(masked, 2u);
  EXPECT_EQ(batch.char_ids[0], (std::vector<std::int32_t>{3, 3, 1, 0, 0}));
  EXPECT_EQ(batch.inputs[0].at(10, 4), 0.0f);
}

TEST(MakeBatchTest, MixRatioControlsAugmentedCount) {
  auto corpus = testing::synthetic_aligned_corpus(8, 3, 8, 12);
  AugmentPolicy policy;
  policy.time_warp = 2;
  policy.mix_ratio = 1.0;
  std::mt19937_64 rng(4);
  std::vector<std::size_t> all{0, 1, 2, 3, 4, 5, 6, 7};
  auto batch = make_batch(corpus, all, rng, policy);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_TRUE(batch.augmented[i]);
    EXPECT_NE(batch.inputs[i].values, batch.targets[i].values) << i;
    bool has_fill = false;
    for (float v : batch.inputs[i].values) has_fill |= v == policy.mask_fill;
    EXPECT_TRUE(has_fill) << i;
    const auto& mel = corpus.utterances[i].mel;
    for (std::size_t t = 0; t < mel.frames; ++t) ASSERT_EQ(batch.targets[i].at(9, t), mel.at(9, t));
  }
  policy.mix_ratio = 0.5;
  auto half = make_batch(corpus, std::vector<std::size_t>{0, 1, 2, 3, 4}, rng, policy);
  EXPECT_EQ(std::count(half.augmented.begin(), half.augmented.end(), true), 3);  // round(2.5)
}

TEST(TeacherForcingTest, DecoderInputIsTargetShiftedByOneFrame) {
  std::vector<float> idx(2 * 6);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t t = 0; t < 6; ++t) idx[r * 6 + t] = static_cast<float>(t + 1);  // frames 1..T
  auto s = Tensor<float>::from_data({2, 6}, idx);
  auto input = shift_right(s);
  for (std::size_t t = 0; t < 6; ++t) {
    // Output position t sees frames < t+1 and is scored on frame t+1.
    EXPECT_EQ(input.at(0, t), static_cast<float>(t));
    EXPECT_EQ(s.at(1, t), static_cast<float>(t + 1));
  }
}

TEST(TrainStepTest, FirstStepIsFiniteAndPaddingIsInvisible) {
  auto corpus = testing::synthetic_aligned_corpus(4, 5);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  std::mt19937_64 rng(1);
  const auto init = initial_parameters(cfg, Stage::kText2Mel, 3);
  auto pa = init.clone(), pb = init.clone(), pc = init.clone();
  AdamState<float> oa, ob, oc;
  std::size_t shortest = 0, longest = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (corpus.utterances[i].mel.frames < corpus.utterances[shortest].mel.frames) shortest = i;
    if (corpus.utterances[i].mel.frames > corpus.utterances[longest].mel.frames) longest = i;
  }
  ASSERT_LT(corpus.utterances[shortest].mel.frames, corpus.utterances[longest].mel.frames);
  auto both = make_batch(corpus, std::vector<std::size_t>{shortest, longest}, rng, no_augment());
  auto alone_s = make_batch(corpus, std::vector<std::size_t>{shortest}, rng, no_augment());
  auto alone_l = make_batch(corpus, std::vector<std::size_t>{longest}, rng, no_augment());
  auto m = train_step_t2m(both, pa, cfg, oa, 1.0);
  auto ms = train_step_t2m(alone_s, pb, cfg, ob, 1.0);
  auto ml = train_step_t2m(alone_l, pc, cfg, oc, 1.0);
  EXPECT_TRUE(std::isfinite(m.total));
  EXPECT_NEAR(m.l_hiera, 0.5 * (ms.l_hiera + ml.l_hiera), 1e-6);
  EXPECT_NEAR(m.l_attn, 0.5 * (ms.l_attn + ml.l_attn), 1e-6);
  EXPECT_NEAR(m.total, m.l_hiera + m.l_attn, 1e-6);
  EXPECT_FALSE(same_values(pa, init));
}

TEST(SsrnCropTest, CropsStayAlignedAcrossTheFourfoldFactor) {
  auto corpus = testing::synthetic_aligned_corpus(6, 9, 10, 14);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t idx = static_cast<std::size_t>(trial) % 6;
    auto c = make_ssrn_crop(corpus, idx, 64, rng);
    const auto& u = corpus.utterances[idx];
    EXPECT_EQ(c.linear_start, 4 * c.mel_start);
    EXPECT_EQ(c.linear_frames, 4 * c.mel_frames);
    EXPECT_EQ(c.mel_frames, 16u);
    EXPECT_LE(c.mel_start + c.mel_frames, u.mel.frames);
    EXPECT_EQ(c.mel.at(7, 3), u.mel.at(7, c.mel_start + 3));
    EXPECT_EQ(c.target.at(100, 9), u.linear.at(100, c.linear_start + 9));
  }
  auto short_corpus = testing::synthetic_aligned_corpus(1, 2, 2, 2);  // 6 mel frames
  auto c = make_ssrn_crop(short_corpus, 0, 64, rng);
  EXPECT_EQ(c.mel_start, 0u);
  EXPECT_EQ(c.mel_frames, 6u);
  EXPECT_EQ(c.linear_frames, 24u);
  EXPECT_THROW(make_ssrn_crop(corpus, 0, 62, rng), Error);
}

TEST(SsrnStepTest, LossIsFinite) {
  auto corpus = testing::synthetic_aligned_corpus(3, 4, 8, 10);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  auto params = initial_parameters(cfg, Stage::kSsrn, 1);
  AdamState<float> opt;
  std::mt19937_64 rng(2);
  std::vector<SsrnCrop> crops{make_ssrn_crop(corpus, 0, 64, rng), make_ssrn_crop(corpus, 2, 64, rng)};
  auto m = train_step_ssrn(crops, params, cfg, opt);
  EXPECT_TRUE(std::isfinite(m.l_hiera));
  EXPECT_GT(m.l1, 0.0);
}

TEST(CheckpointTest, RoundTripIsBitExactIncludingMoments) {
  auto dir = scratch_dir("ckpt");
  auto corpus = testing::synthetic_aligned_corpus(3, 4);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  auto params = initial_parameters(cfg, Stage::kText2Mel, 1);
  AdamState<float> opt;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3; ++i)
    train_step_t2m(make_batch(corpus, 2, rng, no_augment()), params, cfg, opt, 1.0);
  auto ckpt = make_checkpoint(params, opt, 3, "trainer.seed = 1\n");
  save_checkpoint(dir / "a.fctts", ckpt);
  auto loaded = load_checkpoint(dir / "a.fctts");
  EXPECT_EQ(loaded.iteration, 3u);
  EXPECT_EQ(loaded.config_echo, ckpt.config_echo);
  ASSERT_EQ(loaded.names(), ckpt.names());
  for (std::size_t i = 0; i < ckpt.tensors.size(); ++i) {
    const auto& a = ckpt.tensors[i].second;
    const auto& b = loaded.tensors[i].second;
    EXPECT_EQ(a.shape(), b.shape());
    EXPECT_EQ(std::memcmp(a.data().data(), b.data().data(), a.numel() * sizeof(float)), 0);
  }
  auto restored = initial_parameters(cfg, Stage::kText2Mel, 99);
  AdamState<float> ropt;
  restore_checkpoint(loaded, restored, &ropt);
  EXPECT_TRUE(same_values(restored, params));
  EXPECT_EQ(ropt.first_moment, opt.first_moment);
  EXPECT_EQ(ropt.second_moment, opt.second_moment);
  EXPECT_EQ(ropt.step_count, 3u);
  fs::remove_all(dir);
}

TEST(CheckpointTest, RejectsCorruptionAndNameMismatch) {
  auto dir = scratch_dir("ckpt_bad");
  auto corpus = testing::synthetic_aligned_corpus(2, 4);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  auto params = initial_parameters(cfg, Stage::kText2Mel, 1);
  AdamState<float> opt;
  save_checkpoint(dir / "good.fctts", make_checkpoint(params, opt, 0, ""));
  std::string bytes;
  {
    std::ifstream in(dir / "good.fctts", std::ios::binary);
    bytes.assign(std::istreambuf_iterator<char>(in), {});
  }
  auto write = [&](const std::string& name, std::string content) {
    std::ofstream(dir / name, std::ios::binary) << content;
    return dir / name;
  };
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  auto bad_version = bytes;
  bad_version[6] = 2;
  EXPECT_THROW(load_checkpoint(write("magic", bad_magic)), Error);
  EXPECT_THROW(load_checkpoint(write("version", bad_version)), Error);
  EXPECT_THROW(load_checkpoint(write("trunc", bytes.substr(0, bytes.size() / 2))), Error);
  EXPECT_THROW(load_checkpoint(write("extra", bytes + "x")), Error);

  auto ssrn = initial_parameters(cfg, Stage::kSsrn, 1);
  try {
    restore_checkpoint(load_checkpoint(dir / "good.fctts"), ssrn, nullptr);
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("missing: [ssrn/body/conv00/bias"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unexpected: [text2mel/"), std::string::npos) << msg;
  }
  fs::remove_all(dir);
}

TEST(TrainLoopTest, ResumeMatchesStraightRun) {
  auto dir = scratch_dir("resume");
  auto corpus = testing::synthetic_aligned_corpus(6, 8);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  TrainerConfig tc;
  tc.batch_size = 3;
  tc.max_iterations = 100;
  tc.checkpoint_interval = 40;
  tc.seed = 17;
  tc.augment.time_warp = 2;
  for (Stage stage : {Stage::kText2Mel, Stage::kSsrn}) {
    auto straight = train_loop(corpus, cfg, tc, stage, dir / "straight", "echo");
    auto partial = load_checkpoint(dir / "straight" / checkpoint_file_name(stage, 40));
    EXPECT_EQ(partial.iteration, 40u);
    auto resumed = train_loop(corpus, cfg, tc, stage, dir / "resumed", "echo", &partial);
    EXPECT_EQ(resumed.iteration, 100u);
    ASSERT_EQ(straight.names(), resumed.names());
    for (std::size_t i = 0; i < straight.tensors.size(); ++i) {
      auto a = straight.tensors[i].second.data(), b = resumed.tensors[i].second.data();
      ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin(), b.end())) << straight.tensors[i].first;
    }
    EXPECT_TRUE(fs::exists(dir / "straight" / checkpoint_file_name(stage, 80)));
    EXPECT_TRUE(fs::exists(dir / "straight" / checkpoint_file_name(stage, 100)));
    EXPECT_FALSE(fs::exists(dir / "resumed" / checkpoint_file_name(stage, 40)));
    EXPECT_TRUE(fs::exists(dir / "resumed" / checkpoint_file_name(stage, 80)));
  }
  fs::remove_all(dir);
}

TEST(TrainLoopTest, ConfigurationErrors) {
  auto corpus = testing::synthetic_aligned_corpus(2, 8);
  auto cfg = build_network_config(testing::micro_plan(corpus.vocab.size()));
  TrainerConfig tc;
  tc.checkpoint_interval = 0;
  EXPECT_THROW(train_loop(corpus, cfg, tc, Stage::kText2Mel, "", ""), Error);
  tc = TrainerConfig{};
  tc.ssrn_crop = 6;
  EXPECT_THROW(tc.validate(), Error);
  auto wrong = build_network_config(testing::micro_plan(corpus.vocab.size() + 1));
  EXPECT_THROW(train_loop(corpus, wrong, TrainerConfig{}, Stage::kText2Mel, "", ""), Error);
}

}  // namespace
}  // namespace fullconv
