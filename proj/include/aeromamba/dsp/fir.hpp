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
#ifndef AEROMAMBA_DSP_FIR_HPP_
#define AEROMAMBA_DSP_FIR_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "aeromamba/dsp/audio.hpp"

namespace aeromamba::dsp {

// Linear-phase FIR with an odd number of symmetric taps.
class FirFilter {
 public:
  explicit FirFilter(std::vector<double> taps);

  std::span<const double> taps() const { return taps_; }
  std::size_t size() const { return taps_.size(); }
  std::size_t group_delay() const { return (taps_.size() - 1) / 2; }

  // Magnitude of the DTFT at normalized frequency f (cycles/sample).
  double magnitude_at(double f) const;

  // Zero-phase filtering: output[n] = sum_k taps[k] x[n + delay - k], zeros
  // outside the input. Same length as the input.
  std::vector<double> apply(std::span<const double> x) const;

 private:
  std::vector<double> taps_;
};

// Hann-windowed sinc low-pass normalized to unit DC gain.
// cutoff is in cycles/sample, 0 < cutoff < 0.5; num_taps odd and >= 11.
FirFilter design_lowpass(double cutoff, int num_taps);

inline constexpr int kDegradeTaps = 255;
// Fraction of the low-rate Nyquist where the anti-alias filter is centred,
// leaving the transition band below low_rate / 2.
inline constexpr double kDegradeCutoffFraction = 0.96;

// Simulates a low-rate recording at the original rate: anti-alias low-pass,
// decimate by rate/low_rate, zero-stuff back up and interpolate with the same
// filter (gain scaled by the factor). Output length equals input length.
// Requires rate % low_rate == 0.
AudioBuffer degrade(const AudioBuffer& buffer, int low_rate = kLowRate);

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_FIR_HPP_
