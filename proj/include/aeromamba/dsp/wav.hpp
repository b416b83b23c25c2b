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
#ifndef AEROMAMBA_DSP_WAV_HPP_
#define AEROMAMBA_DSP_WAV_HPP_

#include <filesystem>

#include "aeromamba/dsp/audio.hpp"

namespace aeromamba::dsp {

enum class SampleFormat { kPcm16, kPcm24, kFloat32 };

// Reads RIFF/WAVE files holding PCM 16-bit, PCM 24-bit or IEEE float-32
// (plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are scaled by
// 2^-(bits-1). Throws FormatError (with byte offset) for malformed headers,
// UnsupportedFormatError for other codecs and IoError if unreadable.
AudioBuffer load_wav(const std::filesystem::path& path);

// Integer formats clamp to [-1, 1 - 2^(1-bits)] and round half away from
// zero. Float-32 stores static_cast<float>(sample).
void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              SampleFormat format = SampleFormat::kFloat32);

// 16 -> kPcm16, 24 -> kPcm24, 32 -> kFloat32; anything else throws.
SampleFormat sample_format_for_bits(int bits);

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_WAV_HPP_
