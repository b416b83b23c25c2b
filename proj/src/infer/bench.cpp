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
#include "aeromamba/infer/bench.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "aeromamba/dsp/fir.hpp"
#include "aeromamba/dsp/stft.hpp"
#include "aeromamba/errors.hpp"
#include "aeromamba/infer/enhance.hpp"
#include "aeromamba/train/synth.hpp"
#include "aeromamba/util/csv.hpp"

namespace aeromamba::infer {

double realtime_factor(double segment_s, double wall_s) {
  if (!(wall_s > 0.0)) throw ArgumentError(fmt::format("wall time must be positive, got {}", wall_s));
  return segment_s / wall_s;
}

namespace {

// Sequence length and width seen by each Mamba layer.
std::vector<std::pair<std::size_t, std::size_t>> layer_shapes(const model::GeneratorConfig& c,
                                                              std::size_t samples) {
  const std::size_t frames = dsp::stft_frame_count(samples, c.stft);
  const std::size_t m = c.frame_multiple();
  std::size_t t = (frames + m - 1) / m * m;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (int l = 0; l < c.depth; ++l) {
    t /= c.stride;
    out.emplace_back(t, c.channels(l + 1));
  }
  return out;
}

double attention_pass(const model::GeneratorConfig& c, std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double checksum = 0.0;
  for (const auto& [t, d] : layer_shapes(c, samples)) {
    const auto ti = static_cast<Eigen::Index>(t), di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd x(ti, di), wq(di, di), wk(di, di), wv(di, di);
    for (auto* m : {&x, &wq, &wk, &wv}) {
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = normal(rng) / std::sqrt(d);
    }
    const Eigen::MatrixXd q = x * wq, k = x * wk, v = x * wv;
    Eigen::MatrixXd scores = (q * k.transpose()) / std::sqrt(static_cast<double>(d));
    for (Eigen::Index i = 0; i < ti; ++i) {
      const double top = scores.row(i).maxCoeff();
      scores.row(i) = (scores.row(i).array() - top).exp();
      scores.row(i) /= scores.row(i).sum();
    }
    const Eigen::MatrixXd y = scores * v;
    checksum += y(0, 0);
  }
  return checksum;
}

template <typename Fn>
double median_seconds(int repeats, Fn&& fn) {
  std::vector<double> times;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t n = times.size();
  return n % 2 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
}

}  // namespace

std::size_t attention_activation_bytes(const model::GeneratorConfig& config,
                                       std::size_t samples) {
  std::size_t n = 0;
  for (const auto& [t, d] : layer_shapes(config, samples)) n += t * t + 4 * t * d;
  return sizeof(double) * n;
}

std::vector<BenchRow> bench(const model::Generator& generator, const BenchOptions& options) {
  if (options.repeats < 1) throw ArgumentError("bench needs at least one repeat");
  const auto& cfg = generator.config();
  double longest = 0.0;
  for (double s : options.segments) {
    if (!(s > 0.0)) throw ArgumentError(fmt::format("segment length must be positive, got {}", s));
    longest = std::max(longest, s);
  }
  const dsp::AudioBuffer source =
      dsp::degrade(train::synth_track(options.seed, 0, longest));

  std::vector<BenchRow> rows;
  for (double seconds : options.segments) {
    const auto samples = static_cast<std::size_t>(std::llround(seconds * dsp::kHighRate));
    const dsp::AudioBuffer input = source.slice(0, samples);
    const double offline = median_seconds(options.repeats, [&] { enhance_offline(generator, input); });
    rows.push_back({"offline", seconds, offline, generator.cache_bytes(),
                    realtime_factor(seconds, offline)});
    if (!cfg.bidirectional) {
      const double streaming = median_seconds(
          options.repeats, [&] { enhance_streaming(generator, input, options.chunk_frames); });
      rows.push_back({"streaming", seconds, streaming, StreamSession::persistent_bytes(cfg),
                      realtime_factor(seconds, streaming)});
    }
    volatile double sink = 0.0;
    const double attention =
        median_seconds(options.repeats, [&] { sink = sink + attention_pass(cfg, samples, options.seed); });
    rows.push_back({"attention", seconds, attention, attention_activation_bytes(cfg, samples),
                    realtime_factor(seconds, attention)});
  }
  return rows;
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path) {
  util::CsvWriter csv(path, {"mode", "segment_s", "median_s", "state_bytes", "rt_factor"});
  for (const auto& r : rows) {
    csv.row({r.mode, util::format_number(r.segment_s), util::format_number(r.median_s),
             std::to_string(r.state_bytes), util::format_number(r.rt_factor)});
  }
  csv.flush();
}

}  // namespace aeromamba::infer
