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
#ifndef AEROMAMBA_AUTODIFF_ADAM_HPP_
#define AEROMAMBA_AUTODIFF_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "aeromamba/autodiff/tensor.hpp"

namespace aeromamba::ad {

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Adam with bias correction. Moments are kept per parameter in the order the
// parameters were given.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamConfig config = {});

  // Applies one update and clears every gradient. Throws ContractError if a
  // parameter has no gradient.
  void step();

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

 private:
  std::vector<Tensor> params_;
  AdamConfig config_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::uint64_t t_ = 0;
};

// Global L2 norm of all present gradients.
double grad_norm(const std::vector<Tensor>& params);

// Rescales gradients so their global norm is at most max_norm. Returns the
// norm before clipping.
double clip_grad_norm(std::vector<Tensor>& params, double max_norm);

void clear_grads(std::vector<Tensor>& params);

}  // namespace aeromamba::ad

#endif  // AEROMAMBA_AUTODIFF_ADAM_HPP_
