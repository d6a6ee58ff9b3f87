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

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "fullconv/audio.h"
#include "fullconv/spectrogram.h"

namespace fullconv {

/// Hann-windowed STFT with window length equal to n_fft.
struct StftConfig {
  int sample_rate = 22050;
  std::size_t n_fft = 1024;
  std::size_t hop_length = 256;

  std::size_t bins() const { return n_fft / 2 + 1; }
};

struct ComplexSpectrogram {
  std::size_t bins = 0;
  std::size_t frames = 0;
  std::vector<std::complex<double>> values;  // bin-major

  std::complex<double>& at(std::size_t bin, std::size_t frame) {
    return values[bin * frames + frame];
  }
  const std::complex<double>& at(std::size_t bin, std::size_t frame) const {
    return values[bin * frames + frame];
  }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Frames produced for `num_samples` input samples: 1 + floor(len / hop)
/// (inputs shorter than one window are first zero-padded to n_fft).
std::size_t stft_frame_count(std::size_t num_samples, const StftConfig& config);

/// Centered STFT: the signal is reflect-padded by n_fft/2 on both sides so
/// that frame t is centered on sample t*hop.
ComplexSpectrogram stft(const Waveform& wave, const StftConfig& config = {});

/// Least-squares overlap-add inverse of stft(). Output length defaults to
/// (frames - 1) * hop.
Waveform istft(const ComplexSpectrogram& spec, const StftConfig& config = {},
               std::optional<std::size_t> length = std::nullopt);

/// |X| as a linear spectrogram (unnormalized).
Spectrogram magnitude(const ComplexSpectrogram& spec);

/// ||(|STFT(x)| - target)||_F / ||target||_F.
double spectral_convergence(const Spectrogram& target, const Waveform& wave,
                            const StftConfig& config = {});

/// Griffin-Lim phase reconstruction from zero phase. When `convergence` is
/// given it receives the spectral convergence after each iteration.
Waveform griffin_lim(const Spectrogram& magnitudes, const StftConfig& config = {},
                     int iterations = 60, std::vector<double>* convergence = nullptr);

}  // namespace fullconv
