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
#ifndef AEROMAMBA_TESTS_GRADCHECK_HPP_
#define AEROMAMBA_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace aeromamba::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kFdTolerance = 1e-4;
inline constexpr double kFdFloor = 1e-8;

inline double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kFdFloor});
  return std::abs(analytic - numeric) / denom;
}

// Central differences of loss() with respect to every entry of values;
// returns the max relative error against analytic.
inline double max_fd_error(std::span<double> values,
                           std::span<const double> analytic,
                           const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double saved = values[k];
    values[k] = saved + kFdStep;
    const double up = loss();
    values[k] = saved - kFdStep;
    const double down = loss();
    values[k] = saved;
    const double numeric = (up - down) / (2.0 * kFdStep);
    worst = std::max(worst, relative_error(analytic[k], numeric));
  }
  return worst;
}

}  // namespace aeromamba::testing

#endif  // AEROMAMBA_TESTS_GRADCHECK_HPP_
