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
#include "aeromamba/model/discriminator.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::model {

void DiscriminatorConfig::validate() const {
  if (scales < 1 || layers.empty()) {
    throw ArgumentError(fmt::format("invalid discriminator: {} scales, {} layers", scales,
                                    layers.size()));
  }
  int prev = 1;
  auto check = [&prev](const DiscLayerSpec& l) {
    if (l.in_channels != prev || l.groups < 1 || l.in_channels % l.groups != 0 ||
        l.out_channels % l.groups != 0 || l.kernel < 1 || l.stride < 1 || l.padding < 0) {
      throw ArgumentError(fmt::format("invalid discriminator layer {}->{} k{} s{} g{}",
                                      l.in_channels, l.out_channels, l.kernel, l.stride,
                                      l.groups));
    }
    prev = l.out_channels;
  };
  for (const auto& l : layers) check(l);
  check(logit);
}

MultiScaleDiscriminator::MultiScaleDiscriminator(const DiscriminatorConfig& config,
                                                 std::uint64_t seed)
    : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  auto make = [&rng](const DiscLayerSpec& s) {
    const auto fan_in = static_cast<double>(s.in_channels / s.groups * s.kernel);
    const double bound = 1.0 / std::sqrt(fan_in);
    Layer l{s, {}, {}};
    l.weight = uniform_parameter({static_cast<std::size_t>(s.out_channels),
                                  static_cast<std::size_t>(s.in_channels / s.groups),
                                  static_cast<std::size_t>(s.kernel)},
                                 bound, rng);
    l.bias = uniform_parameter({static_cast<std::size_t>(s.out_channels)}, bound, rng);
    return l;
  };
  for (int k = 0; k < config_.scales; ++k) {
    std::vector<Layer> layers;
    for (const auto& s : config_.layers) layers.push_back(make(s));
    layers.push_back(make(config_.logit));
    scales_.push_back(std::move(layers));
  }
}

ad::Tensor MultiScaleDiscriminator::downsample(const ad::Tensor& x) {
  return ad::avg_pool1d(x, 4, 2, 1);
}

std::size_t MultiScaleDiscriminator::min_length() const {
  // Smallest power of two whose coarsest scale survives every strided layer
  // with at least one output position.
  std::size_t total_stride = 1;
  for (const auto& l : config_.layers) total_stride *= static_cast<std::size_t>(l.stride);
  return total_stride << (config_.scales - 1);
}

MultiScaleDiscriminator::Output MultiScaleDiscriminator::forward(const ad::Tensor& wave) const {
  if (wave.rank() != 2) {
    throw ArgumentError(fmt::format("discriminator expects [B, N] waveforms, got {}",
                                    ad::shape_string(wave.shape())));
  }
  if (wave.dim(1) < min_length()) {
    throw ArgumentError(fmt::format("discriminator input of {} samples is shorter than {}",
                                    wave.dim(1), min_length()));
  }
  Output out;
  ad::Tensor x = ad::reshape(wave, {wave.dim(0), 1, wave.dim(1)});
  for (int k = 0; k < config_.scales; ++k) {
    if (k > 0) x = downsample(x);
    ad::Tensor h = x;
    std::vector<ad::Tensor> feats;
    const auto& layers = scales_[k];
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
      const auto& s = layers[i].spec;
      h = ad::leaky_relu(
          ad::conv1d(h, layers[i].weight, layers[i].bias, s.stride, s.padding, s.groups),
          config_.slope);
      feats.push_back(h);
    }
    const auto& last = layers.back();
    out.logits.push_back(ad::conv1d(h, last.weight, last.bias, last.spec.stride,
                                    last.spec.padding, last.spec.groups));
    out.features.push_back(std::move(feats));
  }
  return out;
}

ParameterList MultiScaleDiscriminator::parameters() const {
  ParameterList out;
  for (std::size_t k = 0; k < scales_.size(); ++k) {
    for (std::size_t i = 0; i < scales_[k].size(); ++i) {
      const std::string p = fmt::format("disc.{}.{}.", k, i);
      out.push_back({p + "weight", scales_[k][i].weight});
      out.push_back({p + "bias", scales_[k][i].bias});
    }
  }
  return out;
}

}  // namespace aeromamba::model
