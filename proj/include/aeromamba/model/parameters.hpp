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
#ifndef AEROMAMBA_MODEL_PARAMETERS_HPP_
#define AEROMAMBA_MODEL_PARAMETERS_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "aeromamba/autodiff/tensor.hpp"

namespace aeromamba::model {

struct NamedTensor {
  std::string name;
  ad::Tensor tensor;
};

// Scalar count of one named tensor, derived from a config.
struct LayerCount {
  std::string name;
  std::size_t count;
};

// Ordered list of trainable tensors with dotted names.
using ParameterList = std::vector<NamedTensor>;

std::vector<ad::Tensor> tensors_of(const ParameterList& params);
std::size_t scalar_count(const ParameterList& params);

// Trainable leaf filled uniformly in +-bound.
ad::Tensor uniform_parameter(ad::Shape shape, double bound, std::mt19937_64& rng);
ad::Tensor constant_parameter(ad::Shape shape, double value);

}  // namespace aeromamba::model

#endif  // AEROMAMBA_MODEL_PARAMETERS_HPP_
