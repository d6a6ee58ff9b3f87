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

#include "fullconv/adam.h"

#include <cmath>

#include "fullconv/error.h"
#include "fullconv/ops.h"

namespace fullconv {

template <typename Real>
void adam_step(ParameterSet<Real>& params, AdamState<Real>& state) {
  for (auto& [name, tensor] : params) {
    if (tensor.requires_grad() && !tensor.has_grad()) {
      fail(ErrorKind::kInvalidArgument, "adam_step: parameter '" + name + "' has no gradient");
    }
  }
  const std::uint64_t step = ++state.step_count;
  const AdamConfig& cfg = state.config;
  const Real b1 = static_cast<Real>(cfg.beta1);
  const Real b2 = static_cast<Real>(cfg.beta2);
  const Real correction1 = static_cast<Real>(1.0 - std::pow(cfg.beta1, static_cast<double>(step)));
  const Real correction2 = static_cast<Real>(1.0 - std::pow(cfg.beta2, static_cast<double>(step)));
  const Real alpha = static_cast<Real>(cfg.alpha);
  const Real eps = static_cast<Real>(cfg.epsilon);

  for (auto& [name, tensor] : params) {
    if (!tensor.requires_grad()) continue;
    auto& m = state.first_moment[name];
    auto& v = state.second_moment[name];
    if (m.empty()) m.assign(tensor.numel(), Real(0));
    if (v.empty()) v.assign(tensor.numel(), Real(0));
    if (m.size() != tensor.numel() || v.size() != tensor.numel()) {
      fail(ErrorKind::kShape, "adam_step: moment size mismatch for '" + name + "'");
    }
    auto theta = tensor.mutable_data();
    auto grad = tensor.grad();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const Real g = grad[i];
      m[i] = b1 * m[i] + (Real(1) - b1) * g;
      v[i] = b2 * v[i] + (Real(1) - b2) * g * g;
      const Real m_hat = m[i] / correction1;
      const Real v_hat = v[i] / correction2;
      theta[i] -= alpha * m_hat / (std::sqrt(v_hat) + eps);
    }
    ensure_finite<Real>(theta, "adam_step");
  }
}

template void adam_step<float>(ParameterSet<float>&, AdamState<float>&);
template void adam_step<double>(ParameterSet<double>&, AdamState<double>&);

}  // namespace fullconv
