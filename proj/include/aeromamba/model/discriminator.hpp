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
#ifndef AEROMAMBA_MODEL_DISCRIMINATOR_HPP_
#define AEROMAMBA_MODEL_DISCRIMINATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/model/parameters.hpp"

namespace aeromamba::model {

// Geometry of one convolution layer of a sub-discriminator.
struct DiscLayerSpec {
  int in_channels, out_channels, kernel, stride, padding, groups;
};

struct DiscriminatorConfig {
  int scales = 3;
  double slope = 0.2;
  // Feature layers; each is followed by a leaky ReLU and exposed.
  std::vector<DiscLayerSpec> layers = {
      {1, 8, 15, 1, 7, 1},      {8, 16, 41, 4, 20, 2},   {16, 32, 41, 4, 20, 4},
      {32, 64, 41, 4, 20, 8},   {64, 64, 41, 4, 20, 16}, {64, 64, 5, 1, 2, 1}};
  // Patch-logit layer.
  DiscLayerSpec logit = {64, 1, 3, 1, 1, 1};

  void validate() const;
};

// Waveform discriminators at successively average-pooled input rates.
class MultiScaleDiscriminator {
 public:
  struct Output {
    std::vector<ad::Tensor> logits;                  // per scale, [B, 1, T_k]
    std::vector<std::vector<ad::Tensor>> features;   // per scale, per layer
  };

  explicit MultiScaleDiscriminator(const DiscriminatorConfig& config = {},
                                   std::uint64_t seed = 1);

  // wave: [B, N] with N >= min_length().
  Output forward(const ad::Tensor& wave) const;

  // Input of scale k+1 from scale k: kernel 4, stride 2, padding 1.
  static ad::Tensor downsample(const ad::Tensor& x);

  std::size_t min_length() const;
  ParameterList parameters() const;
  const DiscriminatorConfig& config() const { return config_; }

 private:
  struct Layer {
    DiscLayerSpec spec;
    ad::Tensor weight, bias;
  };
  DiscriminatorConfig config_;
  std::vector<std::vector<Layer>> scales_;  // feature layers then the logit layer
};

}  // namespace aeromamba::model

#endif  // AEROMAMBA_MODEL_DISCRIMINATOR_HPP_
