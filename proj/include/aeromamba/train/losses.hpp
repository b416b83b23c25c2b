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
#ifndef AEROMAMBA_TRAIN_LOSSES_HPP_
#define AEROMAMBA_TRAIN_LOSSES_HPP_

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/dsp/stft.hpp"
#include "aeromamba/model/discriminator.hpp"

namespace aeromamba::train {

inline constexpr double kFeatureWeight = 100.0;
inline constexpr double kLogMagnitudeFloor = 1e-7;

struct LossReport {
  double adversarial = 0.0;     // L_adv
  double reconstruction = 0.0;  // L_rec
  double feature = 0.0;         // L_fmap
  double lambda = kFeatureWeight;
  double generator = 0.0;       // L_G
  double discriminator = 0.0;   // L_D
};

// mean |est - ref| + mean |logmag(stft(est)) - logmag(stft(ref))| with
// logmag = 0.5 * log(|X|^2 + 1e-7). Inputs are [B, N].
ad::Tensor reconstruction_loss(const ad::Tensor& estimate, const ad::Tensor& reference,
                               const dsp::StftConfig& config = {});

// Sum over scales and layers of the mean absolute feature difference; the
// real branch is detached.
ad::Tensor feature_matching_loss(const model::MultiScaleDiscriminator::Output& real,
                                 const model::MultiScaleDiscriminator::Output& fake);

// Hinge objectives summed over scales:
//   L_adv = sum_k mean(max(0, 1 - D_k(fake)))
//   L_D = sum_k mean(max(0, 1 - D_k(real))) + mean(max(0, 1 + D_k(fake)))
ad::Tensor adversarial_loss(const model::MultiScaleDiscriminator::Output& fake,
                            int expected_scales = 3);
ad::Tensor discriminator_loss(const model::MultiScaleDiscriminator::Output& real,
                              const model::MultiScaleDiscriminator::Output& fake,
                              int expected_scales = 3);

// L_G = L_adv + L_rec + lambda * L_fmap. Throws NumericError naming the
// first non-finite component.
LossReport generator_total(double adversarial, double reconstruction, double feature,
                           double lambda = kFeatureWeight);

}  // namespace aeromamba::train

#endif  // AEROMAMBA_TRAIN_LOSSES_HPP_
