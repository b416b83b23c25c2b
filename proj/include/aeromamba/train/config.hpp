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
#ifndef AEROMAMBA_TRAIN_CONFIG_HPP_
#define AEROMAMBA_TRAIN_CONFIG_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "aeromamba/model/generator.hpp"

namespace aeromamba::train {

struct TrainConfig {
  double lr = 3e-4;
  int batch_size = 4;
  std::size_t segment_length = 16384;  // samples
  int epochs = 20;
  int steps_per_epoch = 100;
  std::uint64_t seed = 7;
  int validate_every = 100;  // steps; the final step is always validated
  int validation_tracks = 4;  // held out from the end of the dataset
  double lambda = 100.0;
  double clip_norm = 5.0;
  std::string checkpoint_dir = "checkpoints";
  model::GeneratorConfig generator;

  int total_steps() const { return epochs * steps_per_epoch; }
  void validate() const;

  // INI text with [train] and [generator] sections; every field appears.
  std::string to_text() const;
  // Missing keys keep their defaults; unknown keys are errors.
  static TrainConfig from_text(const std::string& text);
  static TrainConfig from_file(const std::filesystem::path& path);
};

}  // namespace aeromamba::train

#endif  // AEROMAMBA_TRAIN_CONFIG_HPP_
