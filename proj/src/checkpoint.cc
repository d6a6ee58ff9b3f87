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

#include "fullconv/checkpoint.h"

#include <algorithm>
#include <fstream>
#include <set>

#include "binary_io.h"
#include "fullconv/error.h"

namespace fullconv {
namespace {

constexpr char kMagic[6] = {'F', 'C', 'T', 'T', 'S', '1'};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

const Tensor<float>* Checkpoint::find(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return &t;
  return nullptr;
}

std::vector<std::string> Checkpoint::names() const {
  std::vector<std::string> out;
  for (const auto& [n, t] : tensors) out.push_back(n);
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::kIo, "cannot write checkpoint " + tmp.string());
    os.write(kMagic, sizeof(kMagic));
    binary::write_le<std::uint32_t>(os, Checkpoint::kVersion);
    binary::write_le<std::uint64_t>(os, ckpt.iteration);
    binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.tensors.size()));
    for (const auto& [name, tensor] : ckpt.tensors) {
      if (name.size() > 0xFFFF) fail(ErrorKind::kFormat, "checkpoint: tensor name too long");
      if (tensor.rank() > 0xFF) fail(ErrorKind::kFormat, "checkpoint: rank too large");
      binary::write_le<std::uint16_t>(os, static_cast<std::uint16_t>(name.size()));
      os.write(name.data(), static_cast<std::streamsize>(name.size()));
      binary::write_le<std::uint8_t>(os, static_cast<std::uint8_t>(tensor.rank()));
      for (std::size_t d : tensor.shape()) binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(d));
      for (float v : tensor.data()) binary::write_f32(os, v);
    }
    binary::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(ckpt.config_echo.size()));
    os.write(ckpt.config_echo.data(), static_cast<std::streamsize>(ckpt.config_echo.size()));
    if (!os.flush()) fail(ErrorKind::kIo, "failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::kIo, "cannot open checkpoint " + path.string());
  const std::string where = "checkpoint " + path.string();
  if (binary::read_bytes(is, sizeof(kMagic), where + " magic") != std::string(kMagic, sizeof(kMagic)))
    fail(ErrorKind::kFormat, where + ": bad magic");
  const auto version = binary::read_le<std::uint32_t>(is, where + " version");
  if (version != Checkpoint::kVersion)
    fail(ErrorKind::kFormat, where + ": unsupported version " + std::to_string(version));
  Checkpoint ckpt;
  ckpt.iteration = binary::read_le<std::uint64_t>(is, where + " iteration");
  const auto count = binary::read_le<std::uint32_t>(is, where + " tensor count");
  std::set<std::string> seen;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = binary::read_le<std::uint16_t>(is, where + " name length");
    auto name = binary::read_bytes(is, len, where + " name");
    if (!seen.insert(name).second) fail(ErrorKind::kFormat, where + ": duplicate tensor " + name);
    const auto rank = binary::read_le<std::uint8_t>(is, where + " rank");
    Shape shape(rank);
    for (auto& d : shape) {
      d = binary::read_le<std::uint32_t>(is, where + " dims");
      if (d == 0) fail(ErrorKind::kFormat, where + ": zero extent in " + name);
    }
    std::vector<float> values(shape_numel(shape));
    for (auto& v : values) v = binary::read_f32(is, where + " payload of " + name);
    ckpt.tensors.emplace_back(std::move(name), Tensor<float>::from_data(shape, std::move(values)));
  }
  const auto echo_len = binary::read_le<std::uint32_t>(is, where + " config length");
  ckpt.config_echo = binary::read_bytes(is, echo_len, where + " config");
  if (is.peek() != std::ifstream::traits_type::eof())
    fail(ErrorKind::kFormat, where + ": trailing bytes");
  return ckpt;
}

Checkpoint make_checkpoint(const ParameterSet<float>& params, const AdamState<float>& opt,
                           std::uint64_t iteration, std::string config_echo) {
  Checkpoint ckpt;
  ckpt.iteration = iteration;
  ckpt.config_echo = std::move(config_echo);
  for (const auto& [name, t] : params) ckpt.tensors.emplace_back(name, t.detach());
  for (const auto* moments : {&opt.first_moment, &opt.second_moment}) {
    const char* suffix = moments == &opt.first_moment ? ".m1" : ".m2";
    for (const auto& [name, t] : params) {
      auto it = moments->find(name);
      std::vector<float> values = it == moments->end() ? std::vector<float>(t.numel(), 0.0f) : it->second;
      ckpt.tensors.emplace_back(name + suffix, Tensor<float>::from_data(t.shape(), std::move(values)));
    }
  }
  return ckpt;
}

void restore_checkpoint(const Checkpoint& ckpt, ParameterSet<float>& params,
                        AdamState<float>* opt) {
  std::set<std::string> expected;
  for (const auto& [name, t] : params) {
    expected.insert(name);
    expected.insert(name + ".m1");
    expected.insert(name + ".m2");
  }
  std::vector<std::string> missing, extra;
  const auto present = ckpt.names();
  const std::set<std::string> have(present.begin(), present.end());
  for (const auto& n : expected)
    if (!have.count(n)) missing.push_back(n);
  for (const auto& n : have)
    if (!expected.count(n)) extra.push_back(n);
  if (!missing.empty() || !extra.empty()) {
    fail(ErrorKind::kFormat, "checkpoint tensor names differ; missing: [" + join(missing) +
                                 "] unexpected: [" + join(extra) + "]");
  }
  for (auto& [name, t] : params) {
    const auto* src = ckpt.find(name);
    if (src->shape() != t.shape()) {
      fail(ErrorKind::kShape, "checkpoint tensor " + name + " has shape " + shape_string(src->shape()) +
                                  ", model expects " + shape_string(t.shape()));
    }
    auto dst = t.mutable_data();
    std::copy(src->data().begin(), src->data().end(), dst.begin());
  }
  if (opt) {
    opt->first_moment.clear();
    opt->second_moment.clear();
    for (auto& [name, t] : params) {
      auto m1 = ckpt.find(name + ".m1")->data();
      auto m2 = ckpt.find(name + ".m2")->data();
      if (m1.size() != t.numel() || m2.size() != t.numel())
        fail(ErrorKind::kShape, "checkpoint moments of " + name + " have the wrong size");
      opt->first_moment[name].assign(m1.begin(), m1.end());
      opt->second_moment[name].assign(m2.begin(), m2.end());
    }
    opt->step_count = ckpt.iteration;
  }
}

}  // namespace fullconv
