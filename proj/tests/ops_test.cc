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

#include "fullconv/error.h"
#include "fullconv/ops.h"
#include "support/gradcheck.h"
#include "support/oracles.h"
#include "support/random_tensor.h"

namespace fullconv {
namespace {

using testing::check_gradients;
using testing::random_away_from_zero;
using testing::random_tensor;
using testing::to_matrix;
using T = Tensor<double>;

std::vector<testing::Matrix> weights_to_nested(const T& w) {
  std::vector<testing::Matrix> out(w.dim(0), testing::Matrix(w.dim(1), std::vector<double>(w.dim(2))));
  auto data = w.data();
  for (std::size_t a = 0; a < w.dim(0); ++a)
    for (std::size_t b = 0; b < w.dim(1); ++b)
      for (std::size_t k = 0; k < w.dim(2); ++k) out[a][b][k] = data[(a * w.dim(1) + b) * w.dim(2) + k];
  return out;
}

TEST(Conv1dTest, UnitKernelIsIdentity) {
  ConvLayerSpec spec{.in_channels = 1, .out_channels = 1, .kernel_size = 1};
  auto y = conv1d(T::from_data({1, 3}, {1, 2, 3}), spec, T::from_data({1, 1, 1}, {1}),
                  T::from_data({1}, {0}));
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{1, 2, 3}));
}

TEST(Conv1dTest, CausalAnchorTapAndDelayLine) {
  ConvLayerSpec spec{.in_channels = 1, .out_channels = 1, .kernel_size = 2, .causal = true};
  auto x = T::from_data({1, 3}, {5, 7, 9});
  auto b = T::from_data({1}, {0});
  auto anchor = conv1d(x, spec, T::from_data({1, 1, 2}, {0, 1}), b);
  auto delay = conv1d(x, spec, T::from_data({1, 1, 2}, {1, 0}), b);
  EXPECT_EQ(std::vector<double>(anchor.data().begin(), anchor.data().end()), (std::vector<double>{5, 7, 9}));
  EXPECT_EQ(std::vector<double>(delay.data().begin(), delay.data().end()), (std::vector<double>{0, 5, 7}));
}

TEST(Conv1dTest, MatchesDirectConvolutionOracle) {
  for (bool causal : {true, false}) {
    std::mt19937_64 rng(causal ? 11 : 12);
    ConvLayerSpec spec{.in_channels = 3, .out_channels = 4, .kernel_size = 3, .dilation = 3,
                       .causal = causal};
    auto x = random_tensor<double>({3, 16}, rng);
    auto w = random_tensor<double>({4, 3, 3}, rng);
    auto b = random_tensor<double>({4}, rng);
    auto y = conv1d(x, spec, w, b);
    auto expected = testing::direct_conv1d(to_matrix(x), weights_to_nested(w),
                                           {b.data().begin(), b.data().end()}, 3, causal);
    EXPECT_LT(testing::max_relative_difference(to_matrix(y), expected), 1e-6) << causal;
  }
}

TEST(Conv1dTest, SinglePrecisionMatchesOracle) {
  std::mt19937_64 rng(5);
  ConvLayerSpec spec{.in_channels = 3, .out_channels = 2, .kernel_size = 3, .dilation = 3,
                     .causal = true};
  auto x = random_tensor<float>({3, 16}, rng);
  auto w = random_tensor<float>({2, 3, 3}, rng);
  auto b = random_tensor<float>({2}, rng);
  auto y = conv1d(x, spec, w, b);
  auto xd = x.data(), wd = w.data();
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < 16; ++t) {
      double acc = b.data()[c];
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) {
          const long src = static_cast<long>(t) + (static_cast<long>(k) - 2) * 3;
          if (src >= 0) acc += double(wd[(c * 3 + i) * 3 + k]) * xd[i * 16 + src];
        }
      EXPECT_NEAR(y.at(c, t), acc, 1e-5 * std::max(1.0, std::abs(acc)));
    }
}

TEST(Conv1dTest, EvenKernelNonCausalIsRejected) {
  ConvLayerSpec spec{.in_channels = 1, .out_channels = 1, .kernel_size = 2, .causal = false};
  EXPECT_THROW(conv1d(T::zeros({1, 4}), spec, T::zeros({1, 1, 2}), T::zeros({1})), Error);
}

TEST(Conv1dTest, ShapeMismatchNamesTheDimension) {
  ConvLayerSpec spec{.in_channels = 2, .out_channels = 1, .kernel_size = 1};
  try {
    conv1d(T::zeros({3, 4}), spec, T::zeros({1, 2, 1}), T::zeros({1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
    EXPECT_NE(std::string(e.what()).find("input channels (dim 0)"), std::string::npos);
  }
}

TEST(Conv1dTest, CausalPrefixIsUnchangedBySuffixEdits) {
  std::mt19937_64 rng(3);
  ConvLayerSpec spec{.in_channels = 2, .out_channels = 2, .kernel_size = 3, .dilation = 2,
                     .causal = true};
  auto w = random_tensor<double>({2, 2, 3}, rng);
  auto b = random_tensor<double>({2}, rng);
  for (std::size_t t0 = 0; t0 < 10; ++t0) {
    auto x = random_tensor<double>({2, 10}, rng);
    std::vector<double> edited(x.data().begin(), x.data().end());
    edited[t0] += 1.0;
    edited[10 + t0] -= 2.0;
    auto y1 = conv1d(x, spec, w, b);
    auto y2 = conv1d(T::from_data({2, 10}, edited), spec, w, b);
    for (std::size_t c = 0; c < 2; ++c)
      for (std::size_t t = 0; t < t0; ++t) EXPECT_EQ(y1.at(c, t), y2.at(c, t));
  }
}

TEST(Conv1dTransposedTest, DoublesLength) {
  std::mt19937_64 rng(1);
  auto w = random_tensor<double>({2, 2, 2}, rng);
  auto b = T::zeros({2});
  auto once = conv1d_transposed(random_tensor<double>({2, 4}, rng), w, b);
  EXPECT_EQ(once.dim(1), 8u);
  EXPECT_EQ(conv1d_transposed(once, w, b).dim(1), 16u);
}

TEST(Conv1dTransposedTest, DuplicationUpsampler) {
  auto y = conv1d_transposed(T::from_data({1, 1}, {1}), T::from_data({1, 1, 2}, {1, 1}),
                             T::zeros({1}));
  EXPECT_EQ(std::vector<double>(y.data().begin(), y.data().end()), (std::vector<double>{1, 1}));
}

TEST(Conv1dTransposedTest, MatchesScatterOracle) {
  std::mt19937_64 rng(9);
  auto x = random_tensor<double>({3, 5}, rng);
  auto w = random_tensor<double>({3, 4, 2}, rng);
  auto b = random_tensor<double>({4}, rng);
  auto expected = testing::scatter_transposed_conv(to_matrix(x), weights_to_nested(w),
                                                   {b.data().begin(), b.data().end()});
  EXPECT_LT(testing::max_relative_difference(to_matrix(conv1d_transposed(x, w, b)), expected), 1e-6);
}

TEST(Conv1dTransposedTest, ZeroLengthInputCannotBeFormed) {
  EXPECT_THROW(T::zeros({2, 0}), Error);
}

TEST(MatmulTest, Examples) {
  auto id = T::from_data({2, 2}, {1, 0, 0, 1});
  auto b = T::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  auto p = matmul(id, b);
  EXPECT_EQ(std::vector<double>(p.data().begin(), p.data().end()),
            std::vector<double>(b.data().begin(), b.data().end()));
  auto q = matmul(T::from_data({2, 2}, {1, 2, 3, 4}), T::from_data({2, 1}, {1, 1}));
  EXPECT_EQ(q.at(0, 0), 3);
  EXPECT_EQ(q.at(1, 0), 7);
  EXPECT_THROW(matmul(b, b), Error);
}

TEST(MatmulTest, MatchesNaiveLoop) {
  std::mt19937_64 rng(21);
  auto a = random_tensor<double>({7, 5}, rng);
  auto b = random_tensor<double>({5, 3}, rng);
  auto expected = testing::naive_matmul(to_matrix(a), to_matrix(b));
  EXPECT_LT(testing::max_relative_difference(to_matrix(matmul(a, b)), expected), 1e-6);
}

TEST(SoftmaxTest, Examples) {
  auto uniform = softmax_columns(T::full({4, 2}, 3.0));
  for (double v : uniform.data()) EXPECT_DOUBLE_EQ(v, 0.25);
  auto pair = softmax_columns(T::from_data({2, 1}, {0, std::log(3.0)}));
  EXPECT_NEAR(pair.at(0, 0), 0.25, 1e-12);
  EXPECT_NEAR(pair.at(1, 0), 0.75, 1e-12);
  auto peaked = softmax_columns(T::from_data({3, 1}, {0, 20, 0}));
  EXPECT_GT(peaked.at(1, 0), 0.999);
}

TEST(SoftmaxTest, ColumnsSumToOneAndArePositive) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = softmax_columns(random_tensor<double>({6, 9}, rng, -30, 30));
    for (std::size_t c = 0; c < 9; ++c) {
      double total = 0;
      for (std::size_t r = 0; r < 6; ++r) {
        EXPECT_GT(a.at(r, c), 0.0);
        total += a.at(r, c);
      }
      EXPECT_NEAR(total, 1.0, 1e-6);
    }
  }
}

TEST(SoftmaxTest, ValidRowsLeaveTheRestAtZero) {
  auto a = softmax_columns(T::from_data({3, 1}, {1, 1, 50}), 2);
  EXPECT_DOUBLE_EQ(a.at(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(a.at(2, 0), 0.0);
}

TEST(ElementwiseTest, Examples) {
  EXPECT_DOUBLE_EQ(sigmoid(T::from_data({1}, {0})).item(), 0.5);
  EXPECT_NEAR(softplus(T::from_data({1}, {50})).item(), 50.0, 1e-6);
  EXPECT_NEAR(softplus(Tensor<float>::from_data({1}, {50.0f})).item(), 50.0f, 1e-6);
  EXPECT_NEAR(softplus(T::from_data({1}, {-800})).item(), 0.0, 1e-300);
  auto a = T::from_data({2, 2}, {1, 2, 3, 4});
  auto b = T::from_data({3, 2}, {5, 6, 7, 8, 9, 10});
  auto c = concat_channels(a, b);
  EXPECT_EQ(c.dim(0), 5u);
  EXPECT_EQ(std::vector<double>(c.data().begin(), c.data().end()),
            (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
}

TEST(EmbeddingTest, GathersColumnsAndRejectsUnknownIds) {
  auto table = T::from_data({3, 2}, {0, 1, 10, 11, 20, 21});
  std::vector<std::int32_t> ids{2, 0};
  auto e = embedding(table, std::span<const std::int32_t>(ids));
  EXPECT_EQ(e.at(0, 0), 20);
  EXPECT_EQ(e.at(1, 1), 1);
  std::vector<std::int32_t> bad{3};
  EXPECT_THROW(embedding(table, std::span<const std::int32_t>(bad)), Error);
}

// Every differentiable op against central differences (h = 1e-3, float64).
class OpGradientTest : public ::testing::TestWithParam<int> {};

TEST_P(OpGradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(1000 + GetParam());
  auto a = random_away_from_zero<double>({3, 5}, rng, true);
  auto b = random_away_from_zero<double>({3, 5}, rng, true);
  auto w = random_tensor<double>({5, 4}, rng, -1, 1, true);
  auto cw = random_tensor<double>({2, 3, 3}, rng, -1, 1, true);
  auto cb = random_tensor<double>({2}, rng, -1, 1, true);
  auto tw = random_tensor<double>({3, 2, 2}, rng, -1, 1, true);
  auto tb = random_tensor<double>({2}, rng, -1, 1, true);
  auto table = random_tensor<double>({4, 3}, rng, -1, 1, true);
  auto mask = random_tensor<double>({3, 5}, rng, 0, 1);
  std::vector<std::int32_t> ids{1, 3, 3, 0, 2};
  ConvLayerSpec causal{.in_channels = 3, .out_channels = 2, .kernel_size = 3, .dilation = 2,
                       .causal = true};
  ConvLayerSpec centered{.in_channels = 3, .out_channels = 2, .kernel_size = 3, .dilation = 1};

  const std::vector<std::pair<const char*, std::function<T()>>> cases = {
      {"add", [&] { return sum(mul(add(a, b), b)); }},
      {"sub", [&] { return sum(mul(sub(a, b), a)); }},
      {"mul", [&] { return sum(mul(a, b)); }},
      {"scale", [&] { return sum(mul(scale(a, 1.7), a)); }},
      {"add_scalar", [&] { return sum(mul(add_scalar(a, 0.3), a)); }},
      {"sigmoid", [&] { return sum(mul(sigmoid(a), b)); }},
      {"relu", [&] { return sum(mul(relu(a), b)); }},
      {"softplus", [&] { return sum(mul(softplus(scale(a, 4.0)), b)); }},
      {"abs", [&] { return sum(mul(absolute(a), b)); }},
      {"mean", [&] { return mean(mul(a, b)); }},
      {"weighted_sum", [&] { return weighted_sum(mul(a, a), mask); }},
      {"matmul", [&] { return sum(mul(matmul(a, w), matmul(b, w))); }},
      {"transpose", [&] { return sum(matmul(transpose(a), b)); }},
      {"softmax", [&] { return weighted_sum(softmax_columns(scale(a, 3.0)), mask); }},
      {"softmax_valid_rows", [&] { return weighted_sum(softmax_columns(a, 2), mask); }},
      {"concat", [&] { return sum(mul(concat_channels(a, b), concat_channels(b, a))); }},
      {"slice_rows", [&] { return sum(mul(slice_rows(a, 1, 2), slice_rows(b, 0, 2))); }},
      {"slice_columns", [&] { return sum(mul(slice_columns(a, 2, 3), slice_columns(b, 0, 3))); }},
      {"shift_right", [&] { return weighted_sum(shift_right(mul(a, b)), mask); }},
      {"embedding", [&] { return sum(mul(embedding(table, std::span<const std::int32_t>(ids)), a)); }},
      {"conv1d_causal", [&] { return sum(mul(conv1d(a, causal, cw, cb), conv1d(b, causal, cw, cb))); }},
      {"conv1d_centered", [&] { return sum(mul(conv1d(a, centered, cw, cb), conv1d(a, centered, cw, cb))); }},
      {"conv1d_transposed", [&] {
         auto y = conv1d_transposed(a, tw, tb);
         return sum(mul(y, y));
       }},
  };
  for (const auto& [name, fn] : cases) {
    auto result = check_gradients(fn, {a, b, w, cw, cb, tw, tb, table}, 1e-3);
    EXPECT_LT(result.relative_error, 1e-5) << name;
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, OpGradientTest, ::testing::Range(0, 20));

TEST(OpGradientTest, SinglePrecisionWithinLooseTolerance) {
  std::mt19937_64 rng(77);
  using F = Tensor<float>;
  auto x = testing::random_tensor<float>({3, 8}, rng, -1, 1, true);
  auto w = testing::random_tensor<float>({3, 3, 3}, rng, -0.5, 0.5, true);
  auto b = testing::random_tensor<float>({3}, rng, -0.5, 0.5, true);
  ConvLayerSpec spec{.in_channels = 3, .out_channels = 3, .kernel_size = 3, .causal = true};
  auto fn = [&]() -> F { return mean(sigmoid(conv1d(x, spec, w, b))); };
  auto result = testing::check_gradients_f32(fn, {x, w, b}, 1e-2);
  EXPECT_LT(result.relative_error, 1e-3);
}

}  // namespace
}  // namespace fullconv
