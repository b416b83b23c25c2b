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
#ifndef AEROMAMBA_DSP_STFT_HPP_
#define AEROMAMBA_DSP_STFT_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aeromamba/dsp/audio.hpp"

namespace aeromamba::dsp {

// Periodic-Hann STFT geometry. The hop must divide the window with at least
// two frames of overlap so the squared-window envelope never vanishes.
struct StftConfig {
  int window_size = 512;
  int hop_length = 256;

  void validate() const;
  std::size_t bins() const { return window_size / 2 + 1; }
  int half_window() const { return window_size / 2; }

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

// Frames x bins complex values, row-major by frame.
struct ComplexSpectrogram {
  StftConfig config;
  std::size_t frames = 0;
  std::optional<std::size_t> original_length;
  int sample_rate = 0;
  std::vector<std::complex<double>> values;

  std::size_t bins() const { return config.bins(); }
  std::complex<double>& at(std::size_t frame, std::size_t bin) {
    return values[frame * bins() + bin];
  }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const {
    return values[frame * bins() + bin];
  }
};

std::vector<double> hann_periodic(int n);

// ceil((len + W) / H)
std::size_t stft_frame_count(std::size_t length, const StftConfig& config);

// Maps a position of the reflect-padded signal (padded index p corresponds to
// original sample p - W/2) to the original sample it reads, or nullopt for
// the zero tail past len + W. Reflection folds repeatedly for short inputs.
std::optional<std::size_t> padded_source(std::ptrdiff_t padded_index,
                                         std::size_t length, int window_size);

// Windowed real FFT of one frame. frame_samples holds W padded samples.
void analyze_frame(std::span<const double> frame_samples,
                   std::span<const double> window,
                   std::span<std::complex<double>> out);

// Gathers the W padded samples of frame f.
void gather_frame(std::span<const double> signal, const StftConfig& config,
                  std::size_t frame, std::span<double> out);

ComplexSpectrogram stft(std::span<const double> signal,
                        const StftConfig& config, int sample_rate = 0);
// Single-channel buffers only.
ComplexSpectrogram stft(const AudioBuffer& buffer, const StftConfig& config);

// Weighted overlap-add with the analysis window, normalized by the summed
// squared window, truncated to original_length.
std::vector<double> istft_samples(const ComplexSpectrogram& spec);
AudioBuffer istft(const ComplexSpectrogram& spec);

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_STFT_HPP_
