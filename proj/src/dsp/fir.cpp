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
#include "aeromamba/dsp/fir.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

#include <fmt/format.h>

#include "aeromamba/errors.hpp"
#include "aeromamba/util/threads.hpp"

namespace aeromamba::dsp {

FirFilter::FirFilter(std::vector<double> taps) : taps_(std::move(taps)) {
  if (taps_.size() % 2 == 0) {
    throw ArgumentError("FIR filter needs an odd number of taps");
  }
  for (std::size_t i = 0; i < taps_.size() / 2; ++i) {
    if (std::abs(taps_[i] - taps_[taps_.size() - 1 - i]) > 1e-12) {
      throw ArgumentError("FIR taps must be symmetric");
    }
  }
}

double FirFilter::magnitude_at(double f) const {
  std::complex<double> acc = 0.0;
  for (std::size_t n = 0; n < taps_.size(); ++n) {
    acc += taps_[n] * std::polar(1.0, -2.0 * std::numbers::pi * f *
                                          static_cast<double>(n));
  }
  return std::abs(acc);
}

std::vector<double> FirFilter::apply(std::span<const double> x) const {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto delay = static_cast<std::ptrdiff_t>(group_delay());
  const auto taps = static_cast<std::ptrdiff_t>(taps_.size());
  std::vector<double> y(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < taps; ++k) {
      const std::ptrdiff_t j = i + delay - k;
      if (j >= 0 && j < n) acc += taps_[k] * x[j];
    }
    y[i] = acc;
  }
  return y;
}

FirFilter design_lowpass(double cutoff, int num_taps) {
  if (!(cutoff > 0.0 && cutoff < 0.5)) {
    throw ArgumentError(
        fmt::format("cutoff must lie in (0, 0.5) cycles/sample, got {}", cutoff));
  }
  if (num_taps < 11 || num_taps % 2 == 0) {
    throw ArgumentError(
        fmt::format("num_taps must be odd and >= 11, got {}", num_taps));
  }
  const int mid = num_taps / 2;
  std::vector<double> taps(num_taps);
  double sum = 0.0;
  for (int n = 0; n <= mid; ++n) {
    const double t = n - mid;
    const double sinc = t == 0.0 ? 2.0 * cutoff
                                 : std::sin(2.0 * std::numbers::pi * cutoff * t) /
                                       (std::numbers::pi * t);
    const double window =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (num_taps - 1));
    taps[n] = sinc * window;
    taps[num_taps - 1 - n] = taps[n];
  }
  for (double t : taps) sum += t;
  for (double& t : taps) t /= sum;
  return FirFilter(std::move(taps));
}

namespace {

// Anti-alias filter + decimation + zero-stuffing + interpolation, evaluated
// only at the samples the sparse structure makes non-zero.
std::vector<double> degrade_channel(std::span<const double> x,
                                    const FirFilter& fir, int factor) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  const auto delay = static_cast<std::ptrdiff_t>(fir.group_delay());
  const auto taps = fir.taps();
  const auto num_taps = static_cast<std::ptrdiff_t>(taps.size());

  // Low-passed signal at the kept (decimated) positions m * factor.
  const std::ptrdiff_t kept = (n + factor - 1) / factor;
  std::vector<double> low(kept);
  for (std::ptrdiff_t m = 0; m < kept; ++m) {
    const std::ptrdiff_t i = m * factor;
    double acc = 0.0;
    for (std::ptrdiff_t k = 0; k < num_taps; ++k) {
      const std::ptrdiff_t j = i + delay - k;
      if (j >= 0 && j < n) acc += taps[k] * x[j];
    }
    low[m] = acc;
  }

  std::vector<double> y(x.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double acc = 0.0;
    // Only taps landing on a zero-stuffed sample index j = i + delay - k
    // with j % factor == 0 contribute.
    const std::ptrdiff_t first = (i + delay) % factor;
    for (std::ptrdiff_t k = first; k < num_taps; k += factor) {
      const std::ptrdiff_t j = i + delay - k;
      if (j >= 0 && j < n) acc += taps[k] * low[j / factor];
    }
    y[i] = factor * acc;
  }
  return y;
}

}  // namespace

AudioBuffer degrade(const AudioBuffer& buffer, int low_rate) {
  if (low_rate <= 0 || buffer.sample_rate() % low_rate != 0) {
    throw ArgumentError(fmt::format(
        "decimation factor must be an integer ({} Hz / {} Hz)",
        buffer.sample_rate(), low_rate));
  }
  const int factor = buffer.sample_rate() / low_rate;
  if (factor == 1) return buffer;
  const FirFilter fir =
      design_lowpass(kDegradeCutoffFraction * 0.5 / factor, kDegradeTaps);
  std::vector<std::vector<double>> out(buffer.num_channels());
  util::parallel_for(buffer.num_channels(), [&](std::size_t c) {
    out[c] = degrade_channel(buffer.channel(c), fir, factor);
  });
  return AudioBuffer(std::move(out), buffer.sample_rate());
}

}  // namespace aeromamba::dsp
