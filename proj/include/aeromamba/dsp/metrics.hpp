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
#ifndef AEROMAMBA_DSP_METRICS_HPP_
#define AEROMAMBA_DSP_METRICS_HPP_

#include <span>

#include "aeromamba/dsp/audio.hpp"
#include "aeromamba/dsp/stft.hpp"

namespace aeromamba::dsp {

inline constexpr StftConfig kLsdConfig{2048, 512};
inline constexpr double kLsdFloor = 1e-10;

// Log-spectral distance: mean over frames of the RMS (over bins) difference
// of log10 power spectra, averaged over channels. Symmetric, zero iff the
// power spectra agree.
double lsd(const AudioBuffer& reference, const AudioBuffer& estimate);
double lsd(std::span<const double> reference, std::span<const double> estimate);

struct MannWhitneyResult {
  double u = 0.0;           // statistic of sample_a (midranks for ties)
  double p_two_sided = 1.0;
  bool exact = false;       // enumeration rather than normal approximation
};

inline constexpr int kExactMannWhitneyLimit = 12;
inline constexpr double kSignificanceLevel = 0.05;

// Exact permutation p-value when n_a + n_b <= 12, otherwise the normal
// approximation with tie and continuity corrections.
MannWhitneyResult mann_whitney_u(std::span<const double> sample_a,
                                 std::span<const double> sample_b);

inline bool significant(const MannWhitneyResult& r,
                        double level = kSignificanceLevel) {
  return r.p_two_sided < level;
}

// Fraction of signal energy above cutoff_hz (periodogram of the whole
// signal). Used by the dataset and acceptance checks.
double energy_fraction_above(std::span<const double> signal, int sample_rate,
                             double cutoff_hz);
// Energy above cutoff_hz in absolute units (sum of squared FFT magnitudes / n).
double energy_above(std::span<const double> signal, int sample_rate,
                    double cutoff_hz);

}  // namespace aeromamba::dsp

#endif  // AEROMAMBA_DSP_METRICS_HPP_
