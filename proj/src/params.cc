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

#include "fullconv/params.h"

#include "fullconv/error.h"

namespace fullconv {

template <typename Real>
void ParameterSet<Real>::add(std::string name, Tensor<Real> tensor) {
  if (!tensor.defined()) {
    fail(ErrorKind::kInvalidArgument, "parameter '" + name + "' is undefined");
  }
  if (index_.count(name)) {
    fail(ErrorKind::kInvalidArgument, "duplicate parameter name '" + name + "'");
  }
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), std::move(tensor));
}

template <typename Real>
bool ParameterSet<Real>::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

template <typename Real>
const Tensor<Real>& ParameterSet<Real>::at(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    fail(ErrorKind::kInvalidArgument, "no parameter named '" + std::string(name) + "'");
  }
  return entries_[it->second].second;
}

template <typename Real>
Tensor<Real>& ParameterSet<Real>::at(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    fail(ErrorKind::kInvalidArgument, "no parameter named '" + std::string(name) + "'");
  }
  return entries_[it->second].second;
}

template <typename Real>
std::size_t ParameterSet<Real>::total_elements() const {
  std::size_t n = 0;
  for (const auto& entry : entries_) n += entry.second.numel();
  return n;
}

template <typename Real>
std::vector<std::string> ParameterSet<Real>::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& entry : entries_) out.push_back(entry.first);
  return out;
}

template <typename Real>
void ParameterSet<Real>::zero_grad() {
  for (auto& entry : entries_) entry.second.zero_grad();
}

template <typename Real>
ParameterSet<Real> ParameterSet<Real>::clone() const {
  return cast<Real>();
}

template <typename Real>
Tensor<Real> gaussian_init(const Shape& shape, double stddev, std::mt19937_64& rng,
                           bool requires_grad) {
  if (!(stddev > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "gaussian_init: stddev must be positive, got " +
                                          std::to_string(stddev));
  }
  std::normal_distribution<double> normal(0.0, stddev);
  std::vector<Real> values(shape_numel(shape));
  for (auto& v : values) v = static_cast<Real>(normal(rng));
  return Tensor<Real>::from_data(shape, std::move(values), requires_grad);
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template Tensor<float> gaussian_init<float>(const Shape&, double, std::mt19937_64&, bool);
template Tensor<double> gaussian_init<double>(const Shape&, double, std::mt19937_64&, bool);

}  // namespace fullconv
