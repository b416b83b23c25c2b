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
#include "aeromamba/train/synth.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aeromamba/dsp/fir.hpp"
#include "aeromamba/dsp/wav.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::train {

namespace {

constexpr double kTopPartialHz = 20000.0;
constexpr int kMaxPartials = 64;
constexpr double kNotesPerSecond = 2.5;
constexpr double kMaxNoteSeconds = 4.0;
constexpr double kPeak = 0.6;
constexpr double kNoiseRms = 0.02;

// Kellet's three-pole pink filter driven by white noise.
std::vector<double> pink_noise(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> white(0.0, 1.0);
  std::vector<double> out(n);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = white(rng);
    b0 = 0.99765 * b0 + w * 0.0990460;
    b1 = 0.96300 * b1 + w * 0.2965164;
    b2 = 0.57000 * b2 + w * 1.0526913;
    out[i] = b0 + b1 + b2 + w * 0.1848;
  }
  double ss = 0.0;
  for (double v : out) ss += v * v;
  const double scale = n == 0 ? 0.0 : kNoiseRms / std::sqrt(ss / static_cast<double>(n));
  for (double& v : out) v *= scale;
  return out;
}

void add_note(std::vector<double>& out, std::size_t onset, std::mt19937_64& rng) {
  const int rate = dsp::kHighRate;
  std::uniform_int_distribution<int> midi(48, 84);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double f0 = 440.0 * std::pow(2.0, (midi(rng) - 69) / 12.0);
  const double velocity = 0.3 + 0.7 * u(rng);
  const double stiffness = std::pow(10.0, -4.5 + 1.2 * u(rng));
  const double tau = 0.6 + u(rng);
  const std::size_t attack = rate / 500;

  // Damped rotations z_{n+1} = z_n * r * exp(i w), one lane per partial.
  std::vector<double> zr, zi, sr, si;
  for (int k = 1; k <= kMaxPartials; ++k) {
    const double f = k * f0 * std::sqrt(1.0 + stiffness * k * k);
    if (f >= kTopPartialHz) break;
    const double amp = velocity * (0.7 + 0.3 * u(rng)) / std::pow(k, 0.4);
    const double tau_k = tau / (1.0 + f / 8000.0);
    const double r = std::exp(-1.0 / (tau_k * rate));
    const double w = 2.0 * std::numbers::pi * f / rate;
    const double phase = 2.0 * std::numbers::pi * u(rng);
    sr.push_back(r * std::cos(w));
    si.push_back(r * std::sin(w));
    zr.push_back(amp * std::cos(phase));
    zi.push_back(amp * std::sin(phase));
  }
  const std::size_t lanes = zr.size();
  const auto length = std::min<std::size_t>(
      out.size() - onset, static_cast<std::size_t>(std::min(6.9 * tau, kMaxNoteSeconds) * rate));
  for (std::size_t n = 0; n < length; ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < lanes; ++k) {
      acc += zi[k];
      const double nr = zr[k] * sr[k] - zi[k] * si[k];
      zi[k] = zr[k] * si[k] + zi[k] * sr[k];
      zr[k] = nr;
    }
    const double ramp = n < attack ? static_cast<double>(n) / attack : 1.0;
    out[onset + n] += ramp * acc;
  }
}

}  // namespace

dsp::AudioBuffer synth_track(std::uint64_t seed, int index, double seconds) {
  if (!(seconds > 0.0) || index < 0) {
    throw ArgumentError(fmt::format("invalid synthetic track request: index {} seconds {}",
                                    index, seconds));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  const auto n = static_cast<std::size_t>(std::llround(seconds * dsp::kHighRate));
  std::vector<double> out(n, 0.0);
  std::exponential_distribution<double> gap(kNotesPerSecond);
  double t = 0.05 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  while (true) {
    const auto onset = static_cast<std::size_t>(t * dsp::kHighRate);
    if (onset >= n) break;
    add_note(out, onset, rng);
    t += gap(rng);
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out) v *= (kPeak - 0.05) / peak;
  }
  const auto noise = pink_noise(n, rng);
  // Float-representable samples so a float WAV round trip is exact.
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(out[i] + noise[i]);
  return dsp::AudioBuffer::mono(std::move(out), dsp::kHighRate);
}

Track make_track(std::string id, dsp::AudioBuffer high) {
  dsp::AudioBuffer low = dsp::degrade(high);
  return {std::move(id), std::move(high), std::move(low)};
}

std::vector<Track> synth_dataset(std::uint64_t seed, int n_tracks, double seconds) {
  if (n_tracks < 0) throw ArgumentError(fmt::format("invalid track count {}", n_tracks));
  std::vector<Track> tracks;
  for (int i = 0; i < n_tracks; ++i) {
    tracks.push_back(make_track(fmt::format("track_{:03d}", i), synth_track(seed, i, seconds)));
  }
  return tracks;
}

std::vector<Track> load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw IoError(fmt::format("dataset directory '{}' does not exist", dir.string()));
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Track> tracks;
  for (const auto& f : files) {
    dsp::AudioBuffer audio = dsp::load_wav(f);
    if (audio.sample_rate() != dsp::kHighRate) {
      throw ArgumentError(fmt::format("'{}' is {} Hz; training data must be {} Hz", f.string(),
                                      audio.sample_rate(), dsp::kHighRate));
    }
    if (audio.num_channels() != 1) {
      std::vector<double> mono(audio.length(), 0.0);
      for (std::size_t c = 0; c < audio.num_channels(); ++c) {
        const auto ch = audio.channel(c);
        for (std::size_t i = 0; i < mono.size(); ++i) mono[i] += ch[i] / audio.num_channels();
      }
      audio = dsp::AudioBuffer::mono(std::move(mono), audio.sample_rate());
    }
    tracks.push_back(make_track(f.stem().string(), std::move(audio)));
  }
  return tracks;
}

void save_dataset(const std::vector<Track>& tracks, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  for (const auto& t : tracks) dsp::save_wav(t.high, dir / (t.id + ".wav"), dsp::SampleFormat::kFloat32);
}

}  // namespace aeromamba::train
