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
#include <string>
#include <utility>
#include <vector>

#include "fullconv/adam.h"
#include "fullconv/params.h"
#include "fullconv/tensor.h"

namespace fullconv {

/// FCTTS1 snapshot. Layout (little-endian): magic "FCTTS1", u32 version,
/// u64 iteration, u32 tensor count, then per tensor u16 name length, name,
/// u8 rank, u32 dims, f32 payload; finally u32 length + UTF-8 config echo.
/// Adam moments are stored as `<param>.m1` and `<param>.m2`.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::uint64_t iteration = 0;
  std::vector<std::pair<std::string, Tensor<float>>> tensors;
  std::string config_echo;

  const Tensor<float>* find(const std::string& name) const;
  std::vector<std::string> names() const;
};

/// Writes to a temporary sibling and renames, so readers never see a torn file.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Parameters, then both moment sets in parameter order. Missing moments
/// (before the first step) are written as zeros.
Checkpoint make_checkpoint(const ParameterSet<float>& params, const AdamState<float>& opt,
                           std::uint64_t iteration, std::string config_echo);

/// Copies values into `params` (and moments into `opt` when given; the
/// optimizer step count becomes the iteration). The tensor-name set must
/// match exactly, otherwise the error lists missing and unexpected names.
void restore_checkpoint(const Checkpoint& ckpt, ParameterSet<float>& params,
                        AdamState<float>* opt);

}  // namespace fullconv
