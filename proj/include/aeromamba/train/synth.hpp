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
#ifndef AEROMAMBA_TRAIN_SYNTH_HPP_
#define AEROMAMBA_TRAIN_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aeromamba/dsp/audio.hpp"

namespace aeromamba::train {

// Full-band reference and its degraded (band-limited, same-rate) pair.
struct Track {
  std::string id;
  dsp::AudioBuffer high;
  dsp::AudioBuffer low;
};

// Deterministic piano-like mono tracks at 44.1 kHz: randomly timed notes made
// of damped, slightly inharmonic partials up to 20 kHz over a pink-noise bed.
std::vector<Track> synth_dataset(std::uint64_t seed, int n_tracks, double seconds);

// One full-band track of the dataset above.
dsp::AudioBuffer synth_track(std::uint64_t seed, int index, double seconds);

// Pairs full-band audio with its degraded version.
Track make_track(std::string id, dsp::AudioBuffer high);

// Full-band WAV files of a directory, sorted by file name, each paired with
// its degraded version.
std::vector<Track> load_dataset(const std::filesystem::path& dir);
// Writes <id>.wav (32-bit float) for every track.
void save_dataset(const std::vector<Track>& tracks, const std::filesystem::path& dir);

}  // namespace aeromamba::train

#endif  // AEROMAMBA_TRAIN_SYNTH_HPP_
