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
#include "aeromamba/model/parameters.hpp"

#include <utility>

namespace aeromamba::model {

std::vector<ad::Tensor> tensors_of(const ParameterList& params) {
  std::vector<ad::Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.tensor);
  return out;
}

std::size_t scalar_count(const ParameterList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor.size();
  return n;
}

ad::Tensor uniform_parameter(ad::Shape shape, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-bound, bound);
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) x = u(rng);
  return ad::Tensor(std::move(shape), std::move(v), true);
}

ad::Tensor constant_parameter(ad::Shape shape, double value) {
  return ad::Tensor::full(std::move(shape), value, true);
}

}  // namespace aeromamba::model
