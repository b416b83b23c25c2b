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
#include "aeromamba/dsp/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <vector>

#include <fmt/format.h>

#include "aeromamba/dsp/fft.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::dsp {

double lsd(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) {
    throw ArgumentError(fmt::format("lsd length mismatch: {} vs {}",
                                    reference.size(), estimate.size()));
  }
  const ComplexSpectrogram s = stft(reference, kLsdConfig);
  const ComplexSpectrogram e = stft(estimate, kLsdConfig);
  const std::size_t bins = s.bins();
  double total = 0.0;
  for (std::size_t f = 0; f < s.frames; ++f) {
    double sq = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double a = std::log10(std::norm(s.at(f, k)) + kLsdFloor);
      const double b = std::log10(std::norm(e.at(f, k)) + kLsdFloor);
      sq += (a - b) * (a - b);
    }
    total += std::sqrt(sq / bins);
  }
  return total / s.frames;
}

double lsd(const AudioBuffer& reference, const AudioBuffer& estimate) {
  if (reference.sample_rate() != estimate.sample_rate()) {
    throw ArgumentError(fmt::format("lsd rate mismatch: {} vs {}",
                                    reference.sample_rate(),
                                    estimate.sample_rate()));
  }
  if (reference.num_channels() != estimate.num_channels()) {
    throw ArgumentError("lsd channel count mismatch");
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < reference.num_channels(); ++c) {
    sum += lsd(reference.channel(c), estimate.channel(c));
  }
  return sum / reference.num_channels();
}

namespace {

// Midranks of the pooled sample (1-based).
std::vector<double> midranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pooled[a] < pooled[b];
  });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> sample_a,
                                 std::span<const double> sample_b) {
  if (sample_a.empty() || sample_b.empty()) {
    throw ArgumentError("mann_whitney_u needs two non-empty samples");
  }
  const std::size_t na = sample_a.size();
  const std::size_t nb = sample_b.size();
  const std::size_t n = na + nb;
  std::vector<double> pooled(sample_a.begin(), sample_a.end());
  pooled.insert(pooled.end(), sample_b.begin(), sample_b.end());
  const std::vector<double> ranks = midranks(pooled);

  const double offset = 0.5 * static_cast<double>(na * (na + 1));
  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + na, 0.0);
  MannWhitneyResult result;
  result.u = rank_sum_a - offset;
  const double mean_u = 0.5 * static_cast<double>(na * nb);
  const double observed = std::abs(result.u - mean_u);

  if (n <= static_cast<std::size_t>(kExactMannWhitneyLimit)) {
    // Every assignment of na of the pooled ranks to group a is equally likely
    // under the null hypothesis.
    constexpr double kTol = 1e-9;
    std::uint64_t extreme = 0;
    std::uint64_t total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double rs = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) rs += ranks[i];
      }
      ++total;
      if (std::abs(rs - offset - mean_u) >= observed - kTol) ++extreme;
    }
    result.p_two_sided = static_cast<double>(extreme) / static_cast<double>(total);
    result.exact = true;
    return result;
  }

  double tie_term = 0.0;
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double nd = static_cast<double>(n);
  const double variance = static_cast<double>(na * nb) / 12.0 *
                          ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
  if (variance <= 0.0) {
    result.p_two_sided = 1.0;
    return result;
  }
  const double z = std::max(0.0, observed - 0.5) / std::sqrt(variance);
  result.p_two_sided = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return result;
}

double energy_above(std::span<const double> signal, int sample_rate,
                    double cutoff_hz) {
  if (signal.empty()) return 0.0;
  const RealFft& fft = RealFft::of_size(signal.size());
  std::vector<std::complex<double>> spectrum(fft.bins());
  fft.forward(signal.data(), spectrum.data());
  const double n = static_cast<double>(signal.size());
  double above = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double hz = static_cast<double>(k) * sample_rate / n;
    const bool edge = k == 0 || (signal.size() % 2 == 0 && k == spectrum.size() - 1);
    if (hz > cutoff_hz) above += (edge ? 1.0 : 2.0) * std::norm(spectrum[k]);
  }
  // Parseval: sum of x^2 over the whole signal when cutoff_hz < 0.
  return above / n;
}

double energy_fraction_above(std::span<const double> signal, int sample_rate,
                             double cutoff_hz) {
  const double total = energy_above(signal, sample_rate, -1.0);
  if (total <= 0.0) return 0.0;
  return energy_above(signal, sample_rate, cutoff_hz) / total;
}

}  // namespace aeromamba::dsp
