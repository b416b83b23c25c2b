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
#ifndef AEROMAMBA_TESTS_SSM_CASES_HPP_
#define AEROMAMBA_TESTS_SSM_CASES_HPP_

#include <algorithm>
#include <random>
#include <vector>

#include "aeromamba/ssm.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

namespace aeromamba::testing {

using Params = ssm::SsmParams<double>;
using State = ssm::SsmState<double>;

inline Params random_params(int d_inner, int d_state, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Params p = Params::initialized(d_inner, d_state, rng);
  std::normal_distribution<double> n(0.0, 0.3);
  for (double& v : p.a_log) v += n(rng);
  for (double& v : p.d_skip) v = n(rng);
  for (double& v : p.b_delta) v += n(rng);
  return p;
}

inline State random_state(const Params& p, std::uint64_t seed) {
  State s = State::for_params(p);
  s.h = gaussian(s.h.size(), seed, 0.5);
  return s;
}

struct ScanInstance {
  Params p;
  std::vector<double> x;
  State h0;
  std::vector<double> gy;
  std::vector<double> ghf;
};

inline double scan_loss(const ScanInstance& in) {
  const auto r = ssm::scan_sequential<double>(in.p, in.x, in.h0);
  double l = 0.0;
  for (std::size_t k = 0; k < r.y.size(); ++k) l += in.gy[k] * r.y[k];
  for (std::size_t k = 0; k < in.ghf.size(); ++k) l += in.ghf[k] * r.h_final.h[k];
  return l;
}

// Worst relative error of scan_backward against central differences on a
// small random instance.
inline double worst_scan_gradient_error(std::uint64_t seed) {
  ScanInstance in{random_params(4, 3, seed), gaussian(4 * 16, seed + 1), {},
                  gaussian(4 * 16, seed + 2), gaussian(12, seed + 3)};
  in.h0 = random_state(in.p, seed + 4);
  ssm::ScanSaved<double> saved;
  ssm::scan_sequential<double>(in.p, in.x, in.h0, &saved);
  const auto g = ssm::scan_backward<double>(in.p, in.x, in.h0, in.gy, saved, in.ghf);
  auto f = [&] { return scan_loss(in); };
  double worst = max_fd_error(in.x, g.x, f);
  worst = std::max(worst, max_fd_error(in.h0.h, g.h0, f));
  worst = std::max(worst, max_fd_error(in.p.a_log, g.params.a_log, f));
  worst = std::max(worst, max_fd_error(in.p.d_skip, g.params.d_skip, f));
  worst = std::max(worst, max_fd_error(in.p.w_b, g.params.w_b, f));
  worst = std::max(worst, max_fd_error(in.p.w_c, g.params.w_c, f));
  worst = std::max(worst, max_fd_error(in.p.w_delta_down, g.params.w_delta_down, f));
  worst = std::max(worst, max_fd_error(in.p.w_delta_up, g.params.w_delta_up, f));
  worst = std::max(worst, max_fd_error(in.p.b_delta, g.params.b_delta, f));
  return worst;
}

}  // namespace aeromamba::testing

#endif  // AEROMAMBA_TESTS_SSM_CASES_HPP_
