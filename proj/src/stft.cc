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

#include "fullconv/stft.h"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "fullconv/error.h"

namespace fullconv {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per size and live for the whole process.
struct Plans {
  fftw_plan forward;
  fftw_plan inverse;
};

const Plans& plans_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, Plans> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* real = fftw_alloc_real(n);
  fftw_complex* spectrum = fftw_alloc_complex(n / 2 + 1);
  const int size = static_cast<int>(n);
  Plans plans{fftw_plan_dft_r2c_1d(size, real, spectrum, FFTW_ESTIMATE),
              fftw_plan_dft_c2r_1d(size, spectrum, real, FFTW_ESTIMATE)};
  fftw_free(real);
  fftw_free(spectrum);
  return cache.emplace(n, plans).first->second;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n)
      : n_(n),
        plans_(plans_for(n)),
        real_(fftw_alloc_real(n)),
        spectrum_(fftw_alloc_complex(n / 2 + 1)) {}

  double* real() { return real_.get(); }
  std::complex<double>* spectrum() {
    return reinterpret_cast<std::complex<double>*>(spectrum_.get());
  }
  void forward() { fftw_execute_dft_r2c(plans_.forward, real_.get(), spectrum_.get()); }
  // Unnormalized: the result is n times the inverse DFT.
  void inverse() { fftw_execute_dft_c2r(plans_.inverse, spectrum_.get(), real_.get()); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  const Plans& plans_;
  std::unique_ptr<double, FftwDeleter> real_;
  std::unique_ptr<fftw_complex, FftwDeleter> spectrum_;
};

void validate(const StftConfig& config) {
  if (config.n_fft < 4 || config.n_fft % 2 != 0) {
    fail(ErrorKind::kInvalidArgument, "STFT size must be even and at least 4");
  }
  if (config.hop_length == 0 || config.hop_length > config.n_fft) {
    fail(ErrorKind::kInvalidArgument, "STFT hop must be in [1, n_fft]");
  }
}

}  // namespace

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

std::size_t stft_frame_count(std::size_t num_samples, const StftConfig& config) {
  const std::size_t len = std::max(num_samples, config.n_fft);
  return 1 + len / config.hop_length;
}

ComplexSpectrogram stft(const Waveform& wave, const StftConfig& config) {
  validate(config);
  if (wave.samples.empty()) fail(ErrorKind::kInvalidArgument, "stft: empty waveform");
  const std::size_t n_fft = config.n_fft, hop = config.hop_length, half = n_fft / 2;

  std::vector<double> signal(wave.samples.begin(), wave.samples.end());
  if (signal.size() < n_fft) signal.resize(n_fft, 0.0);
  const std::size_t len = signal.size();
  std::vector<double> padded(len + n_fft);
  for (std::size_t i = 0; i < half; ++i) {
    padded[half - 1 - i] = signal[i + 1];
    padded[half + len + i] = signal[len - 2 - i];
  }
  std::copy(signal.begin(), signal.end(), padded.begin() + static_cast<std::ptrdiff_t>(half));

  const auto window = hann_window(n_fft);
  ComplexSpectrogram out;
  out.bins = config.bins();
  out.frames = 1 + (padded.size() - n_fft) / hop;
  out.values.resize(out.bins * out.frames);
  RealFft fft(n_fft);
  for (std::size_t t = 0; t < out.frames; ++t) {
    const double* frame = padded.data() + t * hop;
    for (std::size_t i = 0; i < n_fft; ++i) fft.real()[i] = frame[i] * window[i];
    fft.forward();
    for (std::size_t k = 0; k < out.bins; ++k) out.at(k, t) = fft.spectrum()[k];
  }
  return out;
}

Waveform istft(const ComplexSpectrogram& spec, const StftConfig& config,
               std::optional<std::size_t> length) {
  validate(config);
  if (spec.bins != config.bins()) {
    fail(ErrorKind::kShape, "istft: spectrogram has " + std::to_string(spec.bins) +
                                " bins, expected " + std::to_string(config.bins()));
  }
  if (spec.frames == 0) fail(ErrorKind::kShape, "istft: spectrogram has no frames");
  const std::size_t n_fft = config.n_fft, hop = config.hop_length, half = n_fft / 2;
  const auto window = hann_window(n_fft);
  const std::size_t total = n_fft + (spec.frames - 1) * hop;
  std::vector<double> signal(total, 0.0), weight(total, 0.0);
  RealFft fft(n_fft);
  for (std::size_t t = 0; t < spec.frames; ++t) {
    for (std::size_t k = 0; k < spec.bins; ++k) fft.spectrum()[k] = spec.at(k, t);
    // The imaginary parts of DC and Nyquist are ignored by the real inverse.
    fft.inverse();
    const std::size_t start = t * hop;
    for (std::size_t i = 0; i < n_fft; ++i) {
      signal[start + i] += window[i] * fft.real()[i] / static_cast<double>(n_fft);
      weight[start + i] += window[i] * window[i];
    }
  }
  const std::size_t out_len = length.value_or((spec.frames - 1) * hop);
  Waveform wave;
  wave.sample_rate = config.sample_rate;
  wave.samples.assign(out_len, 0.0f);
  for (std::size_t i = 0; i < out_len && half + i < total; ++i) {
    const double w = weight[half + i];
    wave.samples[i] = w > 1e-10 ? static_cast<float>(signal[half + i] / w) : 0.0f;
  }
  return wave;
}

Spectrogram magnitude(const ComplexSpectrogram& spec) {
  Spectrogram out(SpectrogramKind::kLinear, spec.bins, spec.frames);
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    out.values[i] = static_cast<float>(std::abs(spec.values[i]));
  }
  return out;
}

double spectral_convergence(const Spectrogram& target, const Waveform& wave,
                            const StftConfig& config) {
  const auto spec = stft(wave, config);
  if (spec.bins != target.bins) fail(ErrorKind::kShape, "spectral_convergence: bin mismatch");
  const std::size_t frames = std::min(spec.frames, target.frames);
  double diff = 0, norm = 0;
  for (std::size_t k = 0; k < target.bins; ++k) {
    for (std::size_t t = 0; t < target.frames; ++t) {
      const double want = target.at(k, t);
      const double got = t < frames ? std::abs(spec.at(k, t)) : 0.0;
      diff += (got - want) * (got - want);
      norm += want * want;
    }
  }
  return norm > 0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

Waveform griffin_lim(const Spectrogram& magnitudes, const StftConfig& config, int iterations,
                     std::vector<double>* convergence) {
  validate(config);
  if (magnitudes.bins != config.bins()) {
    fail(ErrorKind::kShape, "griffin_lim: expected " + std::to_string(config.bins()) +
                                " bins, got " + std::to_string(magnitudes.bins));
  }
  if (magnitudes.frames == 0) fail(ErrorKind::kShape, "griffin_lim: no frames");
  if (iterations < 0) fail(ErrorKind::kInvalidArgument, "griffin_lim: negative iteration count");
  for (float m : magnitudes.values) {
    if (!(m >= 0.0f) || !std::isfinite(m)) {
      fail(ErrorKind::kInvalidArgument, "griffin_lim: magnitudes must be finite and nonnegative");
    }
  }
  const std::size_t length = (magnitudes.frames - 1) * config.hop_length;

  ComplexSpectrogram estimate;
  estimate.bins = magnitudes.bins;
  estimate.frames = magnitudes.frames;
  estimate.values.resize(magnitudes.values.size());
  for (std::size_t i = 0; i < magnitudes.values.size(); ++i) estimate.values[i] = magnitudes.values[i];
  Waveform wave = istft(estimate, config, length);

  for (int it = 0; it < iterations; ++it) {
    const auto rebuilt = stft(wave, config);
    for (std::size_t k = 0; k < estimate.bins; ++k) {
      for (std::size_t t = 0; t < estimate.frames; ++t) {
        const auto z = t < rebuilt.frames ? rebuilt.at(k, t) : std::complex<double>(0, 0);
        const double mag = std::abs(z);
        const std::complex<double> phase = mag > 0 ? z / mag : std::complex<double>(1, 0);
        estimate.at(k, t) = static_cast<double>(magnitudes.at(k, t)) * phase;
      }
    }
    wave = istft(estimate, config, length);
    if (convergence) convergence->push_back(spectral_convergence(magnitudes, wave, config));
  }
  return wave;
}

}  // namespace fullconv
