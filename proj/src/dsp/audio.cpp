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
#include "aeromamba/dsp/audio.hpp"

#include <algorithm>
#include <utility>

#include <fmt/format.h>

#include "aeromamba/errors.hpp"

namespace aeromamba::dsp {

AudioBuffer::AudioBuffer(std::vector<std::vector<double>> channels,
                         int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) {
    throw ArgumentError(fmt::format("sample rate must be positive, got {}",
                                    sample_rate_));
  }
  if (channels_.empty()) throw ArgumentError("audio needs at least one channel");
  for (const auto& ch : channels_) {
    if (ch.size() != channels_.front().size()) {
      throw ArgumentError("all channels must have the same length");
    }
  }
}

AudioBuffer AudioBuffer::mono(std::vector<double> samples, int sample_rate) {
  std::vector<std::vector<double>> channels;
  channels.push_back(std::move(samples));
  return AudioBuffer(std::move(channels), sample_rate);
}

AudioBuffer AudioBuffer::silence(std::size_t channels, std::size_t length,
                                 int sample_rate) {
  return AudioBuffer(
      std::vector<std::vector<double>>(channels, std::vector<double>(length)),
      sample_rate);
}

AudioBuffer AudioBuffer::slice(std::size_t begin, std::size_t count) const {
  begin = std::min(begin, length());
  count = std::min(count, length() - begin);
  std::vector<std::vector<double>> out;
  out.reserve(channels_.size());
  for (const auto& ch : channels_) {
    out.emplace_back(ch.begin() + begin, ch.begin() + begin + count);
  }
  return AudioBuffer(std::move(out), sample_rate_);
}

}  // namespace aeromamba::dsp
