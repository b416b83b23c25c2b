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
#ifndef AEROMAMBA_INFER_BENCH_HPP_
#define AEROMAMBA_INFER_BENCH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aeromamba/model/generator.hpp"

namespace aeromamba::infer {

inline const std::vector<double> kDefaultBenchSegments = {1, 2, 5, 10, 20};

struct BenchRow {
  std::string mode;  // offline | streaming | attention
  double segment_s = 0.0;
  double median_s = 0.0;
  // offline: carried scan state; streaming: session bytes; attention:
  // activation bytes of the matched-width attention stand-in.
  std::size_t state_bytes = 0;
  double rt_factor = 0.0;
};

double realtime_factor(double segment_s, double wall_s);

// Activation bytes for one sequence if every Mamba layer were replaced by
// single-head softmax attention of the same width: per level, the T x T score
// matrix plus query, key, value and output rows.
std::size_t attention_activation_bytes(const model::GeneratorConfig& config,
                                       std::size_t samples);

struct BenchOptions {
  std::vector<double> segments = kDefaultBenchSegments;
  int repeats = 3;
  std::size_t chunk_frames = 256;
  std::uint64_t seed = 1;
};

// Times offline and streaming enhancement plus the attention stand-in on
// synthetic input, median over repeats, for each segment length.
std::vector<BenchRow> bench(const model::Generator& generator, const BenchOptions& options = {});

void write_bench_csv(const std::vector<BenchRow>& rows, const std::filesystem::path& path);

}  // namespace aeromamba::infer

#endif  // AEROMAMBA_INFER_BENCH_HPP_
