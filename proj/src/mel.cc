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

#include "fullconv/mel.h"

#include <algorithm>
#include <cmath>

#include "fullconv/error.h"

namespace fullconv {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank build_mel_filterbank(int sample_rate, std::size_t n_fft, std::size_t n_mels,
                                   double f_min, double f_max) {
  if (sample_rate <= 0) fail(ErrorKind::kInvalidArgument, "mel filterbank: bad sample rate");
  const std::size_t bins = n_fft / 2 + 1;
  if (n_mels == 0 || n_mels > bins) {
    fail(ErrorKind::kInvalidArgument, "mel filterbank: " + std::to_string(n_mels) +
                                          " filters do not fit in " + std::to_string(bins) +
                                          " bins");
  }
  if (f_max <= 0.0) f_max = sample_rate / 2.0;
  if (f_min < 0.0 || f_min >= f_max) {
    fail(ErrorKind::kInvalidArgument, "mel filterbank: need 0 <= f_min < f_max");
  }

  MelFilterbank bank;
  bank.n_mels = n_mels;
  bank.n_bins = bins;
  bank.f_min = f_min;
  bank.f_max = f_max;
  const double mel_lo = hz_to_mel(f_min), mel_hi = hz_to_mel(f_max);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));
  }
  bank.center_hz.assign(edges.begin() + 1, edges.end() - 1);
  bank.weights.assign(n_mels * bins, 0.0);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m], center = edges[m + 1], hi = edges[m + 2];
    double peak = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double rise = (f - lo) / (center - lo);
      const double fall = (hi - f) / (hi - center);
      const double w = std::max(0.0, std::min(rise, fall));
      bank.weights[m * bins + k] = w;
      peak = std::max(peak, w);
    }
    if (peak <= 0.0) {
      fail(ErrorKind::kInvalidArgument, "mel filterbank: filter " + std::to_string(m) +
                                            " covers no FFT bin; use fewer mels or a larger FFT");
    }
    for (std::size_t k = 0; k < bins; ++k) bank.weights[m * bins + k] /= peak;
  }
  return bank;
}

Spectrogram apply_filterbank(const MelFilterbank& bank, const Spectrogram& linear) {
  if (linear.bins != bank.n_bins) {
    fail(ErrorKind::kShape, "apply_filterbank: spectrogram has " + std::to_string(linear.bins) +
                                " bins, filterbank expects " + std::to_string(bank.n_bins));
  }
  Spectrogram out(SpectrogramKind::kMel, bank.n_mels, linear.frames);
  std::vector<double> acc(linear.frames);
  for (std::size_t m = 0; m < bank.n_mels; ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t k = 0; k < bank.n_bins; ++k) {
      const double w = bank.at(m, k);
      if (w == 0.0) continue;
      const float* row = linear.values.data() + k * linear.frames;
      for (std::size_t t = 0; t < linear.frames; ++t) acc[t] += w * row[t];
    }
    for (std::size_t t = 0; t < linear.frames; ++t) out.at(m, t) = static_cast<float>(acc[t]);
  }
  return out;
}

Spectrogram mel_spectrogram(const Waveform& wave, const MelFilterbank& bank,
                            const StftConfig& config) {
  return apply_filterbank(bank, magnitude(stft(wave, config)));
}

Spectrogram normalize(const Spectrogram& spec, const NormalizationConfig& config) {
  if (config.min_db >= 0.0) fail(ErrorKind::kInvalidArgument, "normalize: min_db must be negative");
  Spectrogram out = spec;
  for (auto& v : out.values) {
    if (!(v >= 0.0f)) fail(ErrorKind::kInvalidArgument, "normalize: negative or NaN magnitude");
    const double db = 20.0 * std::log10(std::max(static_cast<double>(v), config.floor));
    const double x = (db - config.ref_db - config.min_db) / -config.min_db;
    v = static_cast<float>(std::clamp(x, 0.0, 1.0));
  }
  out.normalized = true;
  return out;
}

Spectrogram denormalize(const Spectrogram& spec, const NormalizationConfig& config) {
  Spectrogram out = spec;
  for (auto& v : out.values) {
    const double x = std::clamp(static_cast<double>(v), 0.0, 1.0);
    const double db = x * -config.min_db + config.min_db + config.ref_db;
    v = static_cast<float>(std::pow(10.0, db / 20.0));
  }
  out.normalized = false;
  return out;
}

Spectrogram reduce_frames(const Spectrogram& spec, std::size_t factor) {
  if (factor == 0) fail(ErrorKind::kInvalidArgument, "reduce_frames: factor must be positive");
  const std::size_t frames = (spec.frames + factor - 1) / factor;
  Spectrogram out(spec.kind, spec.bins, frames);
  out.normalized = spec.normalized;
  out.reduced = true;
  for (std::size_t b = 0; b < spec.bins; ++b) {
    for (std::size_t t = 0; t < frames; ++t) out.at(b, t) = spec.at(b, t * factor);
  }
  return out;
}

}  // namespace fullconv
