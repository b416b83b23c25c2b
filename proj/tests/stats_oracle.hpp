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
#ifndef AEROMAMBA_TESTS_STATS_ORACLE_HPP_
#define AEROMAMBA_TESTS_STATS_ORACLE_HPP_

#include <bit>
#include <cmath>
#include <vector>

namespace aeromamba::testing {

// Brute force: U as a pairwise count, p by enumerating which pooled values
// land in group a.
struct BruteForce {
  double u;
  double p;
};

inline BruteForce brute_force_mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
  auto pairwise_u = [](const std::vector<double>& xa, const std::vector<double>& xb) {
    double u = 0.0;
    for (double x : xa) {
      for (double y : xb) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    }
    return u;
  };
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const double mean = 0.5 * a.size() * b.size();
  const double observed = std::abs(pairwise_u(a, b) - mean);
  int extreme = 0, total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != static_cast<int>(a.size())) continue;
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? ga : gb).push_back(pooled[i]);
    ++total;
    if (std::abs(pairwise_u(ga, gb) - mean) >= observed - 1e-9) ++extreme;
  }
  return {pairwise_u(a, b), static_cast<double>(extreme) / total};
}

}  // namespace aeromamba::testing

#endif  // AEROMAMBA_TESTS_STATS_ORACLE_HPP_
