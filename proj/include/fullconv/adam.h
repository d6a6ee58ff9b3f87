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
#include <map>
#include <string>
#include <vector>

#include "fullconv/params.h"

namespace fullconv {

struct AdamConfig {
  double alpha = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double epsilon = 1e-6;
};

/// Zero-initialised first/second moments keyed by parameter name.
template <typename Real>
struct AdamState {
  AdamConfig config;
  std::uint64_t step_count = 0;
  std::map<std::string, std::vector<Real>> first_moment;
  std::map<std::string, std::vector<Real>> second_moment;
};

/// One bias-corrected Adam update of every parameter that requires grad:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   theta <- theta - alpha * m_hat / (sqrt(v_hat) + eps).
/// Throws if such a parameter has no gradient.
template <typename Real>
void adam_step(ParameterSet<Real>& params, AdamState<Real>& state);

extern template void adam_step<float>(ParameterSet<float>&, AdamState<float>&);
extern template void adam_step<double>(ParameterSet<double>&, AdamState<double>&);

}  // namespace fullconv
