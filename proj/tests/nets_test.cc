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

#include <cmath>
#include <random>
#include <set>

#include "fullconv/error.h"
#include "fullconv/losses.h"
#include "fullconv/nets.h"
#include "fullconv/ops.h"
#include "support/gradcheck.h"
#include "support/oracles.h"
#include "support/random_tensor.h"
#include "support/toy_models.h"

namespace fullconv {
namespace {

using testing::random_ids;
using testing::random_tensor;
using testing::tiny_plan;
using testing::toy_plan;

bool columns_equal(const Tensor<float>& a, const Tensor<float>& b, std::size_t col) {
  for (std::size_t r = 0; r < a.dim(0); ++r)
    if (a.at(r, col) != b.at(r, col)) return false;
  return true;
}

TEST(NetworkConfigTest, DefaultPlansMatchDeclaredLayout) {
  PlanOptions o;
  o.vocab_size = 40;
  auto cfg = build_network_config(o);
  EXPECT_EQ(cfg.text_encoder.size(), 1u + 8u + 2u);
  EXPECT_EQ(cfg.audio_encoder.size(), 1u + 8u);
  EXPECT_EQ(cfg.audio_decoder.size(), 1u + 4u + 3u);
  EXPECT_EQ(cfg.text_encoder.front().in_channels, 128u);
  EXPECT_EQ(cfg.text_encoder.back().out_channels, 512u);
  EXPECT_EQ(cfg.audio_decoder.back().out_channels, 80u);
  EXPECT_EQ(cfg.ssrn.back().out_channels, 513u);
  EXPECT_EQ(cfg.ssrn.front().out_channels, 512u);
}

TEST(NetworkConfigTest, ValidationRejectsBrokenPlans) {
  auto cfg = build_network_config(toy_plan());
  auto broken = cfg;
  broken.audio_encoder[1].causal = false;
  EXPECT_THROW(broken.validate(), Error);
  broken = cfg;
  broken.text_encoder[1].in_channels += 1;
  EXPECT_THROW(broken.validate(), Error);
  broken = cfg;
  broken.ssrn.erase(broken.ssrn.begin() + 3);
  EXPECT_THROW(broken.validate(), Error);
  broken = cfg;
  broken.vocab_size = 2;
  EXPECT_THROW(broken.validate(), Error);
}

TEST(NetworkParamsTest, NamesAreUniqueAndStructured) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 rng(1);
  auto t2m = init_text2mel<float>(cfg, rng);
  auto ssrn = init_ssrn<float>(cfg, rng);
  std::set<std::string> seen;
  for (const auto* set : {&t2m, &ssrn}) {
    for (const auto& [name, tensor] : *set) {
      EXPECT_TRUE(seen.insert(name).second) << name;
      EXPECT_EQ(std::count(name.begin(), name.end(), '/'), 3) << name;
      for (float v : tensor.data()) ASSERT_TRUE(std::isfinite(v));
    }
  }
  EXPECT_TRUE(t2m.contains("text2mel/text_encoder/embedding/weight"));
  EXPECT_TRUE(t2m.contains("text2mel/audio_decoder/conv00/weight"));
  EXPECT_TRUE(ssrn.contains("ssrn/body/deconv03/weight"));
  EXPECT_EQ(t2m.size(), 1 + 2 * (cfg.text_encoder.size() + cfg.audio_encoder.size() +
                                 cfg.audio_decoder.size()));
}

TEST(NetworkParamsTest, InitIsSeedDeterministic) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 a(5), b(5);
  auto pa = init_text2mel<float>(cfg, a);
  auto pb = init_text2mel<float>(cfg, b);
  for (const auto& [name, tensor] : pa) {
    auto x = tensor.data(), y = pb.at(name).data();
    EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin())) << name;
  }
}

TEST(FullSizeTest, Text2MelShapes) {
  PlanOptions o;
  o.vocab_size = 40;
  auto cfg = build_network_config(o);
  std::mt19937_64 rng(2);
  auto params = init_text2mel<float>(cfg, rng);
  NoGradGuard guard;
  for (std::size_t n : {1u, 7u}) {
    auto ids = random_ids(n, 40, rng);
    auto enc = text_encoder(params, cfg, ids);
    EXPECT_EQ(enc.keys.shape(), (Shape{256, n}));
    EXPECT_EQ(enc.values.shape(), (Shape{256, n}));
  }
  auto mel = random_tensor<float>({80, 5}, rng, 0, 1);
  EXPECT_EQ(audio_encoder(params, cfg, mel).shape(), (Shape{256, 5}));
  auto out = text2mel_forward(params, cfg, random_ids(6, 40, rng), mel);
  EXPECT_EQ(out.logits.shape(), (Shape{80, 5}));
  EXPECT_EQ(out.alignment.shape(), (Shape{6, 5}));
  for (float v : out.logits.data()) EXPECT_LT(std::abs(v), 100.0f);
  const auto probs = sigmoid(out.logits);
  for (float v : probs.data()) {
    EXPECT_GT(v, 0.0f);
    EXPECT_LT(v, 1.0f);
  }
}

TEST(FullSizeTest, SsrnQuadruplesLengthTo513Bins) {
  PlanOptions o;
  o.vocab_size = 40;
  auto cfg = build_network_config(o);
  std::mt19937_64 rng(3);
  auto params = init_ssrn<float>(cfg, rng);
  NoGradGuard guard;
  auto out = ssrn_forward(params, cfg, random_tensor<float>({80, 16}, rng, 0, 1));
  EXPECT_EQ(out.shape(), (Shape{513, 64}));
}

TEST(AttentionTest, ZeroInputsGiveUniformColumns) {
  auto a = attention(Tensor<double>::zeros({256, 4}), Tensor<double>::zeros({256, 3}));
  for (double v : a.data()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(AttentionTest, ScoresAreDividedBySqrtD) {
  std::vector<double> k(256 * 2, 0.0), q(256, 0.0);
  k[0 * 2 + 0] = 4.0;  // key 0 = 4 e0
  k[1 * 2 + 1] = 1.0;  // key 1 = e1
  q[0] = 8.0;
  auto logits = attention_logits(Tensor<double>::from_data({256, 2}, k),
                                 Tensor<double>::from_data({256, 1}, q));
  EXPECT_DOUBLE_EQ(logits.at(0, 0), 32.0 / 16.0);
  EXPECT_DOUBLE_EQ(logits.at(1, 0), 0.0);
}

TEST(AttentionTest, LogitGapOfTwentyConcentratesMass) {
  const std::size_t d = 256, n = 6;
  std::vector<double> k(d * n, 0.0), q(d, 0.0);
  k[0 * n + 2] = 1.0;
  q[0] = 20.0 * 16.0;  // gap 20 after the 1/16 scaling
  auto a = attention(Tensor<double>::from_data({d, n}, k), Tensor<double>::from_data({d, 1}, q));
  EXPECT_GT(a.at(2, 0), 0.99);
  double total = 0;
  for (double v : a.data()) total += v;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(AttendTest, OneHotUniformAndNaiveLoop) {
  std::mt19937_64 rng(7);
  auto v = random_tensor<double>({5, 4}, rng);
  std::vector<double> onehot(4 * 3, 0.0);
  onehot[2 * 3 + 0] = 1.0;
  onehot[0 * 3 + 1] = 1.0;
  onehot[3 * 3 + 2] = 1.0;
  auto r = attend(v, Tensor<double>::from_data({4, 3}, onehot));
  const std::size_t picks[3] = {2, 0, 3};
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(r.at(c, t), v.at(c, picks[t]));

  auto uniform = attend(v, Tensor<double>::full({4, 2}, 0.25));
  for (std::size_t c = 0; c < 5; ++c) {
    double m = 0;
    for (std::size_t j = 0; j < 4; ++j) m += v.at(c, j) / 4;
    EXPECT_NEAR(uniform.at(c, 1), m, 1e-15);
  }

  auto a = softmax_columns(random_tensor<double>({4, 6}, rng));
  auto expected = testing::naive_matmul(testing::to_matrix(v), testing::to_matrix(a));
  EXPECT_LT(testing::max_relative_difference(testing::to_matrix(attend(v, a)), expected), 1e-12);
}

TEST(AudioEncoderTest, ZeroInputGivesConstantColumns) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 rng(4);
  auto params = init_text2mel<float>(cfg, rng);
  NoGradGuard guard;
  const std::size_t frames = 40;
  auto zero = Tensor<float>::zeros({80, frames});
  auto same_as = [](const Tensor<float>& q, std::size_t t, std::size_t ref) {
    for (std::size_t c = 0; c < q.dim(0); ++c)
      if (q.at(c, t) != q.at(c, ref)) return false;
    return true;
  };
  // Fresh init has zero biases: every column is the same.
  auto q = audio_encoder(params, cfg, zero);
  for (std::size_t t = 1; t < frames; ++t) EXPECT_TRUE(same_as(q, t, 0)) << t;
  // With biases, columns agree once the causal zero padding is out of view.
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& v : t.mutable_data()) v = 0.1f;
  q = audio_encoder(params, cfg, zero);
  const std::size_t settled = causal_lookback(cfg.audio_encoder);
  ASSERT_LT(settled, frames);
  for (std::size_t t = settled + 1; t < frames; ++t) EXPECT_TRUE(same_as(q, t, settled)) << t;
  EXPECT_GT(q.at(0, settled), 0.0f);
}

TEST(CausalityTest, PrefixIsBitIdenticalUnderSuffixPerturbation) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 rng(11);
  auto params = init_text2mel<float>(cfg, rng);
  NoGradGuard guard;
  const std::size_t frames = 20;
  auto mel = random_tensor<float>({80, frames}, rng, 0, 1);
  auto r_prime = random_tensor<float>({2 * cfg.d, frames}, rng);
  auto q0 = audio_encoder(params, cfg, mel);
  auto y0 = audio_decoder(params, cfg, r_prime);
  std::uniform_int_distribution<std::size_t> pick(0, frames - 1);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  for (int c = 0; c < 100; ++c) {
    const std::size_t t0 = pick(rng);
    std::vector<float> m(mel.data().begin(), mel.data().end());
    std::vector<float> r(r_prime.data().begin(), r_prime.data().end());
    for (std::size_t b = 0; b < 80; ++b) m[b * frames + t0] += noise(rng);
    for (std::size_t b = 0; b < 2 * cfg.d; ++b) r[b * frames + t0] += noise(rng);
    auto q = audio_encoder(params, cfg, Tensor<float>::from_data({80, frames}, m));
    auto y = audio_decoder(params, cfg, Tensor<float>::from_data({2 * cfg.d, frames}, r));
    for (std::size_t t = 0; t < t0; ++t) {
      ASSERT_TRUE(columns_equal(q, q0, t)) << "encoder t0=" << t0 << " t=" << t;
      ASSERT_TRUE(columns_equal(y, y0, t)) << "decoder t0=" << t0 << " t=" << t;
    }
    EXPECT_FALSE(columns_equal(q, q0, t0));
  }
}

TEST(TextEncoderTest, EditsStayInsideReceptiveField) {
  auto cfg = build_network_config(toy_plan(12));
  std::mt19937_64 rng(12);
  auto params = init_text2mel<float>(cfg, rng);
  const std::size_t radius = noncausal_radius(cfg.text_encoder);
  EXPECT_EQ(radius, 1u + 3u + 9u);
  NoGradGuard guard;
  const std::size_t n = 60;
  auto ids = random_ids(n, 12, rng);
  ids[20] = 3;
  ids[23] = 7;
  auto swapped = ids;
  std::swap(swapped[20], swapped[23]);
  auto k0 = text_encoder(params, cfg, ids).keys;
  auto k1 = text_encoder(params, cfg, swapped).keys;
  bool changed_inside = false;
  for (std::size_t j = 0; j < n; ++j) {
    const auto far = [&](std::size_t p) { return (j > p ? j - p : p - j) > radius; };
    if (far(20) && far(23)) {
      EXPECT_TRUE(columns_equal(k0, k1, j)) << j;
    } else {
      changed_inside |= !columns_equal(k0, k1, j);
    }
  }
  EXPECT_TRUE(changed_inside);
}

TEST(TextEncoderTest, RejectsIdsOutsideVocabulary) {
  auto cfg = build_network_config(toy_plan(12));
  std::mt19937_64 rng(1);
  auto params = init_text2mel<float>(cfg, rng);
  std::vector<std::int32_t> ids{3, 12};
  EXPECT_THROW(text_encoder(params, cfg, ids), Error);
}

TEST(SsrnTest, NonCausalAndLengthContract) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 rng(13);
  auto params = init_ssrn<float>(cfg, rng);
  NoGradGuard guard;
  for (std::size_t t : {1u, 3u, 16u}) {
    auto out = ssrn_forward(params, cfg, random_tensor<float>({80, t}, rng, 0, 1));
    EXPECT_EQ(out.shape(), (Shape{513, 4 * t}));
  }
  auto mel = random_tensor<float>({80, 10}, rng, 0, 1);
  auto base = ssrn_forward(params, cfg, mel);
  std::vector<float> edited(mel.data().begin(), mel.data().end());
  for (std::size_t b = 0; b < 80; ++b) edited[b * 10 + 6] += 0.5f;
  auto out = ssrn_forward(params, cfg, Tensor<float>::from_data({80, 10}, edited));
  bool earlier_changed = false;
  for (std::size_t f = 0; f < 4 * 6; ++f) earlier_changed |= !columns_equal(base, out, f);
  EXPECT_TRUE(earlier_changed);
}

TEST(Text2MelTest, DeterministicForFixedInputs) {
  auto cfg = build_network_config(toy_plan());
  std::mt19937_64 rng(14);
  auto params = init_text2mel<float>(cfg, rng);
  auto ids = random_ids(5, 12, rng);
  auto mel = random_tensor<float>({80, 7}, rng, 0, 1);
  auto a = text2mel_forward(params, cfg, ids, mel);
  auto b = text2mel_forward(params, cfg, ids, mel);
  EXPECT_TRUE(std::equal(a.logits.data().begin(), a.logits.data().end(), b.logits.data().begin()));
  EXPECT_EQ(a.alignment.shape(), (Shape{5, 7}));
  for (std::size_t t = 0; t < 7; ++t) {
    double total = 0;
    for (std::size_t n = 0; n < 5; ++n) total += a.alignment.at(n, t);
    EXPECT_NEAR(total, 1.0, 1e-6);
  }
}

// Composed-graph gradient checks in double precision.
class ComposedGradientTest : public ::testing::TestWithParam<int> {};

std::vector<Tensor<double>> leaves_of(ParameterSet<double>& params) {
  std::vector<Tensor<double>> out;
  for (auto& [name, t] : params) out.push_back(t);
  return out;
}

TEST_P(ComposedGradientTest, Text2MelHieraAndAttention) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  auto cfg = build_network_config(tiny_plan());
  std::mt19937_64 rng(seed);
  auto params = init_text2mel<double>(cfg, rng);
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& v : t.mutable_data()) v = std::normal_distribution<double>(0, 0.1)(rng);
  auto ids = random_ids(4, 10, rng);
  auto mel = random_tensor<double>({cfg.n_mels, 6}, rng, 0, 1);
  auto target = random_tensor<double>({cfg.n_mels, 6}, rng, 0, 1);
  auto wt = guided_weights(4, 6).as_tensor<double>();
  auto fn = [&] {
    auto out = text2mel_forward(params, cfg, ids, shift_right(mel));
    return total_t2m_loss(out.logits, target, out.alignment, wt, 1.0);
  };
  auto result = testing::check_gradients(fn, leaves_of(params), 1e-6, 6, seed);
  EXPECT_LT(result.relative_error, 1e-5);
}

TEST_P(ComposedGradientTest, SsrnHiera) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  auto cfg = build_network_config(tiny_plan());
  std::mt19937_64 rng(seed + 100);
  auto params = init_ssrn<double>(cfg, rng);
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& v : t.mutable_data()) v = std::normal_distribution<double>(0, 0.1)(rng);
  auto coarse = random_tensor<double>({cfg.n_mels, 3}, rng, 0, 1);
  auto target = random_tensor<double>({cfg.n_linear, 12}, rng, 0, 1);
  auto fn = [&] { return l_hiera(ssrn_forward(params, cfg, coarse), target); };
  auto result = testing::check_gradients(fn, leaves_of(params), 1e-6, 6, seed);
  EXPECT_LT(result.relative_error, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ComposedGradientTest, ::testing::Range(0, 20));

// Whole-graph single-precision check. Deep relu stacks make float central
// differences unreliable (any step large enough to beat rounding crosses
// kinks), so the float backward pass is compared with double differences
// of the same parameters.
class ComposedGradientF32Test : public ::testing::TestWithParam<int> {};

TEST_P(ComposedGradientF32Test, Text2MelSinglePrecision) {
  const auto seed = static_cast<std::uint64_t>(GetParam());
  auto cfg = build_network_config(tiny_plan());
  std::mt19937_64 rng(seed + 200);
  auto params = init_text2mel<float>(cfg, rng);
  for (auto& [name, t] : params)
    if (name.ends_with("bias"))
      for (auto& v : t.mutable_data()) v = std::normal_distribution<float>(0, 0.1f)(rng);
  auto twin = params.cast<double>();
  auto ids = random_ids(5, 10, rng);
  auto mel = random_tensor<float>({cfg.n_mels, 8}, rng, 0, 1);
  auto mel64 = Tensor<double>::from_data(mel.shape(), {mel.data().begin(), mel.data().end()});
  auto fn32 = [&] {
    auto out = text2mel_forward(params, cfg, ids, shift_right(mel));
    return total_t2m_loss(out.logits, mel, out.alignment, guided_weights(5, 8).as_tensor<float>(), 1.0);
  };
  auto fn64 = [&] {
    auto out = text2mel_forward(twin, cfg, ids, shift_right(mel64));
    return total_t2m_loss(out.logits, mel64, out.alignment, guided_weights(5, 8).as_tensor<double>(), 1.0);
  };
  std::vector<Tensor<float>> leaves;
  for (auto& [name, t] : params) leaves.push_back(t);
  auto result = testing::check_gradients_f32_vs_f64(fn32, leaves, fn64, leaves_of(twin), 1e-6,
                                                    std::numeric_limits<std::size_t>::max(), seed);
  EXPECT_LT(result.relative_error, 1e-3);
}

INSTANTIATE_TEST_SUITE_P(Seeds, ComposedGradientF32Test, ::testing::Range(0, 5));

}  // namespace
}  // namespace fullconv
