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
#include "aeromamba/train/losses.hpp"

#include <fmt/format.h>

#include <cmath>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::train {

namespace {

ad::Tensor hinge_mean(const ad::Tensor& logits, double sign) {
  // mean(max(0, 1 + sign * logits))
  return ad::mean(ad::relu(ad::add_scalar(ad::scale(logits, sign), 1.0)));
}

void check_scales(const model::MultiScaleDiscriminator::Output& out, int expected,
                  const char* what) {
  if (out.logits.size() != static_cast<std::size_t>(expected)) {
    throw ContractError(fmt::format("{}: expected logits for {} scales, got {}", what,
                                    expected, out.logits.size()));
  }
}

}  // namespace

ad::Tensor reconstruction_loss(const ad::Tensor& estimate, const ad::Tensor& reference,
                               const dsp::StftConfig& config) {
  if (estimate.shape() != reference.shape()) {
    throw ArgumentError(fmt::format("reconstruction loss: estimate {} vs reference {}",
                                    ad::shape_string(estimate.shape()),
                                    ad::shape_string(reference.shape())));
  }
  const ad::Tensor wave = ad::l1(estimate, reference);
  const ad::Tensor mag = ad::l1(ad::log_magnitude(ad::stft(estimate, config), kLogMagnitudeFloor),
                                ad::log_magnitude(ad::stft(reference, config), kLogMagnitudeFloor));
  return ad::add(wave, mag);
}

ad::Tensor feature_matching_loss(const model::MultiScaleDiscriminator::Output& real,
                                 const model::MultiScaleDiscriminator::Output& fake) {
  if (real.features.size() != fake.features.size() || real.features.empty()) {
    throw ContractError(fmt::format("feature matching: {} real scales vs {} fake scales",
                                    real.features.size(), fake.features.size()));
  }
  ad::Tensor total;
  for (std::size_t k = 0; k < real.features.size(); ++k) {
    if (real.features[k].size() != fake.features[k].size()) {
      throw ContractError(fmt::format("feature matching: scale {} has {} real vs {} fake maps",
                                      k, real.features[k].size(), fake.features[k].size()));
    }
    for (std::size_t i = 0; i < real.features[k].size(); ++i) {
      const auto& r = real.features[k][i];
      const auto& f = fake.features[k][i];
      if (r.shape() != f.shape()) {
        throw ContractError(fmt::format("feature matching: map {}.{} shapes {} vs {}", k, i,
                                        ad::shape_string(r.shape()), ad::shape_string(f.shape())));
      }
      const ad::Tensor term = ad::l1(f, r.detach());
      total = total.defined() ? ad::add(total, term) : term;
    }
  }
  return total;
}

ad::Tensor adversarial_loss(const model::MultiScaleDiscriminator::Output& fake,
                            int expected_scales) {
  check_scales(fake, expected_scales, "adversarial loss");
  ad::Tensor total = hinge_mean(fake.logits[0], -1.0);
  for (std::size_t k = 1; k < fake.logits.size(); ++k) {
    total = ad::add(total, hinge_mean(fake.logits[k], -1.0));
  }
  return total;
}

ad::Tensor discriminator_loss(const model::MultiScaleDiscriminator::Output& real,
                              const model::MultiScaleDiscriminator::Output& fake,
                              int expected_scales) {
  check_scales(real, expected_scales, "discriminator loss (real)");
  check_scales(fake, expected_scales, "discriminator loss (fake)");
  ad::Tensor total;
  for (std::size_t k = 0; k < real.logits.size(); ++k) {
    const ad::Tensor term =
        ad::add(hinge_mean(real.logits[k], -1.0), hinge_mean(fake.logits[k], 1.0));
    total = total.defined() ? ad::add(total, term) : term;
  }
  return total;
}

LossReport generator_total(double adversarial, double reconstruction, double feature,
                           double lambda) {
  const std::pair<const char*, double> parts[] = {
      {"L_adv", adversarial}, {"L_rec", reconstruction}, {"L_fmap", feature}, {"lambda", lambda}};
  for (const auto& [name, v] : parts) {
    if (!std::isfinite(v)) {
      throw NumericError(fmt::format("non-finite loss component {} = {}", name, v));
    }
  }
  LossReport r;
  r.adversarial = adversarial;
  r.reconstruction = reconstruction;
  r.feature = feature;
  r.lambda = lambda;
  r.generator = adversarial + reconstruction + lambda * feature;
  return r;
}

}  // namespace aeromamba::train
