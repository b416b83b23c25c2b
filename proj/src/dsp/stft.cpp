// Copyright 2026 The aeromamba Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "aeromamba/dsp/stft.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "aeromamba/dsp/fft.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::dsp {

void StftConfig::validate() const {
  if (window_size <= 0 || window_size % 2 != 0) {
    throw ArgumentError(
        fmt::format("STFT window must be positive and even, got {}", window_size));
  }
  if (hop_length <= 0 || window_size % hop_length != 0 ||
      window_size / hop_length < 2) {
    throw ArgumentError(fmt::format(
        "STFT hop {} must divide window {} with at least 2x overlap",
        hop_length, window_size));
  }
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

std::size_t stft_frame_count(std::size_t length, const StftConfig& config) {
  const std::size_t span = length + config.window_size;
  return (span + config.hop_length - 1) / config.hop_length;
}

std::optional<std::size_t> padded_source(std::ptrdiff_t padded_index,
                                         std::size_t length, int window_size) {
  const auto n = static_cast<std::ptrdiff_t>(length);
  if (padded_index < 0 || padded_index >= n + window_size) return std::nullopt;
  std::ptrdiff_t i = padded_index - window_size / 2;
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= n) i = period - i;
  return static_cast<std::size_t>(i);
}

void gather_frame(std::span<const double> signal, const StftConfig& config,
                  std::size_t frame, std::span<double> out) {
  const auto start = static_cast<std::ptrdiff_t>(frame) * config.hop_length;
  for (int m = 0; m < config.window_size; ++m) {
    const auto src = padded_source(start + m, signal.size(), config.window_size);
    out[m] = src ? signal[*src] : 0.0;
  }
}

void analyze_frame(std::span<const double> frame_samples,
                   std::span<const double> window,
                   std::span<std::complex<double>> out) {
  thread_local std::vector<double> windowed;
  windowed.resize(frame_samples.size());
  for (std::size_t m = 0; m < frame_samples.size(); ++m) {
    windowed[m] = frame_samples[m] * window[m];
  }
  RealFft::of_size(frame_samples.size()).forward(windowed.data(), out.data());
}

ComplexSpectrogram stft(std::span<const double> signal,
                        const StftConfig& config, int sample_rate) {
  config.validate();
  if (signal.empty()) throw ArgumentError("stft of an empty signal");
  ComplexSpectrogram spec;
  spec.config = config;
  spec.frames = stft_frame_count(signal.size(), config);
  spec.original_length = signal.size();
  spec.sample_rate = sample_rate;
  spec.values.resize(spec.frames * config.bins());
  const std::vector<double> window = hann_periodic(config.window_size);
  std::vector<double> frame(config.window_size);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    gather_frame(signal, config, f, frame);
    analyze_frame(frame, window,
                  std::span(spec.values).subspan(f * config.bins(), config.bins()));
  }
  return spec;
}

ComplexSpectrogram stft(const AudioBuffer& buffer, const StftConfig& config) {
  if (buffer.num_channels() != 1) {
    throw ArgumentError(fmt::format("stft expects one channel, got {}",
                                    buffer.num_channels()));
  }
  return stft(buffer.channel(0), config, buffer.sample_rate());
}

std::vector<double> istft_samples(const ComplexSpectrogram& spec) {
  spec.config.validate();
  if (!spec.original_length) {
    throw ArgumentError("istft needs the original signal length");
  }
  const std::size_t bins = spec.bins();
  if (spec.values.size() != spec.frames * bins) {
    throw ArgumentError("spectrogram values do not match frames x bins");
  }
  const int w = spec.config.window_size;
  const int hop = spec.config.hop_length;
  const std::size_t length = *spec.original_length;
  const std::size_t padded = spec.frames == 0 ? 0 : (spec.frames - 1) * hop + w;
  if (padded < length + w / 2) {
    throw ArgumentError("spectrogram has too few frames for its length");
  }
  const std::vector<double> window = hann_periodic(w);
  const RealFft& fft = RealFft::of_size(w);
  std::vector<double> acc(padded, 0.0);
  std::vector<double> env(padded, 0.0);
  std::vector<double> frame(w);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    fft.inverse(&spec.values[f * bins], frame.data());
    const std::size_t start = f * hop;
    for (int m = 0; m < w; ++m) {
      acc[start + m] += frame[m] / w * window[m];
      env[start + m] += window[m] * window[m];
    }
  }
  std::vector<double> out(length);
  for (std::size_t n = 0; n < length; ++n) {
    out[n] = acc[n + w / 2] / env[n + w / 2];
  }
  return out;
}

AudioBuffer istft(const ComplexSpectrogram& spec) {
  if (spec.sample_rate <= 0) {
    throw ArgumentError("spectrogram carries no sample rate");
  }
  return AudioBuffer::mono(istft_samples(spec), spec.sample_rate);
}

}  // namespace aeromamba::dsp
