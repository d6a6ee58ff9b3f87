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
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fullconv/tensor.h"

namespace fullconv {

/// Ordered, uniquely named collection of trainable tensors. Names follow
/// `<network>/<block>/<layer>/<weight|bias>` and are the checkpoint keys.
template <typename Real>
class ParameterSet {
 public:
  using Entry = std::pair<std::string, Tensor<Real>>;

  void add(std::string name, Tensor<Real> tensor);
  bool contains(std::string_view name) const;
  const Tensor<Real>& at(std::string_view name) const;
  Tensor<Real>& at(std::string_view name);

  std::size_t size() const { return entries_.size(); }
  std::size_t total_elements() const;
  std::vector<std::string> names() const;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  void zero_grad();

  /// Deep copy (fresh leaves with the same values and requires_grad flags).
  ParameterSet clone() const;

  /// Deep copy converted to another precision.
  template <typename Other>
  ParameterSet<Other> cast() const {
    ParameterSet<Other> out;
    for (const auto& [name, tensor] : entries_) {
      std::vector<Other> values(tensor.data().begin(), tensor.data().end());
      out.add(name, Tensor<Other>::from_data(tensor.shape(), std::move(values),
                                             tensor.requires_grad()));
    }
    return out;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// I.i.d. N(0, stddev^2) samples. Same generator state gives identical tensors.
template <typename Real>
Tensor<Real> gaussian_init(const Shape& shape, double stddev, std::mt19937_64& rng,
                           bool requires_grad = true);

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;

}  // namespace fullconv
