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
#ifndef AEROMAMBA_DSP_AUDIO_HPP_
#define AEROMAMBA_DSP_AUDIO_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace aeromamba::dsp {

inline constexpr int kHighRate = 44100;
inline constexpr int kLowRate = 11025;

// Multichannel waveform. Amplitudes are nominally in [-1, 1]; every channel
// has the same length and the rate is positive (checked on construction).
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(std::vector<std::vector<double>> channels, int sample_rate);

  static AudioBuffer mono(std::vector<double> samples, int sample_rate);
  static AudioBuffer silence(std::size_t channels, std::size_t length,
                             int sample_rate);

  int sample_rate() const { return sample_rate_; }
  std::size_t num_channels() const { return channels_.size(); }
  std::size_t length() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  double seconds() const {
    return static_cast<double>(length()) / sample_rate_;
  }

  std::span<const double> channel(std::size_t c) const {
    return channels_.at(c);
  }
  std::span<double> mutable_channel(std::size_t c) { return channels_.at(c); }
  const std::vector<std::vector<double>>& channels() const {
    return channels_;
  }

  // Samples [begin, begin + count) of every channel; clipped to the end.
  AudioBuffer slice(std::size_t begin, std::size_t count) const;

  friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_ = 0;
};

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_AUDIO_HPP_
