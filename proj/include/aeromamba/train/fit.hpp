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
#ifndef AEROMAMBA_TRAIN_FIT_HPP_
#define AEROMAMBA_TRAIN_FIT_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aeromamba/autodiff/adam.hpp"
#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/model/discriminator.hpp"
#include "aeromamba/model/generator.hpp"
#include "aeromamba/train/config.hpp"
#include "aeromamba/train/losses.hpp"
#include "aeromamba/train/synth.hpp"

namespace aeromamba::train {

struct Batch {
  ad::Tensor low;   // [B, N]
  ad::Tensor high;  // [B, N]
};

// Seeded random crops of aligned low/high segments.
class BatchSampler {
 public:
  BatchSampler(std::span<const Track> tracks, int batch_size, std::size_t segment_length,
               std::uint64_t seed);
  Batch next();

 private:
  std::span<const Track> tracks_;
  int batch_size_;
  std::size_t segment_length_;
  std::mt19937_64 rng_;
};

struct StepOptions {
  bool freeze_discriminator = false;
};

struct StepResult {
  LossReport losses;
  double generator_norm = 0.0;      // before clipping
  double discriminator_norm = 0.0;  // before clipping; 0 when frozen
};

// One discriminator step followed by one generator step on the same batch.
class Trainer {
 public:
  explicit Trainer(const TrainConfig& config);

  StepResult step(const Batch& batch, const StepOptions& options = {});

  model::Generator& generator() { return generator_; }
  const model::Generator& generator() const { return generator_; }
  const model::MultiScaleDiscriminator& discriminator() const { return discriminator_; }
  const TrainConfig& config() const { return config_; }

 private:
  TrainConfig config_;
  model::Generator generator_;
  model::MultiScaleDiscriminator discriminator_;
  std::vector<ad::Tensor> g_params_;
  std::vector<ad::Tensor> d_params_;
  ad::Adam g_opt_;
  ad::Adam d_opt_;
};

// Mean LSD between the reference and the enhanced low-resolution input.
double validation_lsd(const model::Generator& generator, std::span<const Track> tracks);
// Mean LSD of the unprocessed low-resolution inputs.
double baseline_lsd(std::span<const Track> tracks);

struct StepRecord {
  int step = 0;  // 1-based
  LossReport losses;
  std::optional<double> val_lsd;
};

struct FitOptions {
  StepOptions step;
  std::function<void(const StepRecord&)> on_step;
};

struct FitResult {
  std::filesystem::path best_checkpoint;
  std::filesystem::path last_checkpoint;
  std::filesystem::path metrics_csv;
  double best_val_lsd = 0.0;
  int best_step = 0;
  double baseline_lsd = 0.0;
};

// Trains on all but the last validation_tracks tracks and validates on those.
// Writes metrics.csv and train.log to out_dir and best.amba / last.amba to
// out_dir / checkpoint_dir.
FitResult fit(const TrainConfig& config, const std::vector<Track>& dataset,
              const std::filesystem::path& out_dir, const FitOptions& options = {});

}  // namespace aeromamba::train

#endif  // AEROMAMBA_TRAIN_FIT_HPP_
