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
#include "aeromamba/ssm.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gradcheck.hpp"
#include "ssm_cases.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aeromamba::ssm {
namespace {

using Params = SsmParams<double>;
using State = SsmState<double>;
using testing::random_params;
using testing::random_state;
using testing::worst_scan_gradient_error;

// Parameters reproducing the scalar recurrence h_t = 0.5 h_{t-1} + x_t with
// C = 1 and D = 0 when x_t = 1.
Params scalar_half_decay() {
  Params p = Params::zeros(1, 1, 1);
  p.b_delta[0] = std::log(std::numbers::e - 1.0);  // softplus -> 1
  p.a_log[0] = std::log(std::log(2.0));            // A = -ln 2
  p.w_b[0] = 1.0;
  p.w_c[0] = 1.0;
  return p;
}

TEST(SelectiveProject, ZeroInputGivesSoftplusOfBias) {
  Params p = Params::zeros(8, 4);
  const std::vector<double> x(8, 0.0);
  const auto proj = selective_project<double>(p, x);
  for (double d : proj.delta) EXPECT_NEAR(d, std::log(2.0), 1e-15);
  for (double b : proj.b) EXPECT_EQ(b, 0.0);
  for (double c : proj.c) EXPECT_EQ(c, 0.0);
}

TEST(SelectiveProject, DeltaAlwaysPositive) {
  const Params p = random_params(8, 4, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  std::vector<double> x(8);
  for (int draw = 0; draw < 10000; ++draw) {
    for (double& v : x) v = n(rng);
    for (double d : selective_project<double>(p, x).delta) ASSERT_GT(d, 0.0);
  }
}

TEST(SelectiveProject, NonFiniteInputRejected) {
  const Params p = Params::zeros(2, 2);
  const std::vector<double> x{0.0, std::nan("")};
  EXPECT_THROW(selective_project<double>(p, x), NumericError);
}

TEST(Discretize, LimitsAndHalfDecay) {
  const std::vector<double> tiny{1e-300};
  const std::vector<double> a{-3.0};
  const std::vector<double> b{2.0};
  const auto z = discretize<double>(tiny, a, b);
  EXPECT_EQ(z.a_bar[0], 1.0);
  EXPECT_NEAR(z.b_bar[0], 0.0, 1e-299);

  const std::vector<double> one{1.0};
  const std::vector<double> ln2{-std::log(2.0)};
  EXPECT_NEAR(discretize<double>(one, ln2, b).a_bar[0], 0.5, 1e-16);
}

TEST(Discretize, DecayStrictlyInsideUnitInterval) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  for (int draw = 0; draw < 1000; ++draw) {
    const Params p = random_params(4, 3, draw);
    const std::vector<double> delta{u(rng), u(rng), u(rng), u(rng)};
    const auto z = discretize<double>(delta, continuous_a(p), std::vector<double>(3, 1.0));
    for (double v : z.a_bar) {
      ASSERT_GT(v, 0.0);
      ASSERT_LT(v, 1.0);
    }
  }
  EXPECT_THROW(discretize<double>(std::vector<double>{0.0}, std::vector<double>{-1.0},
                                  std::vector<double>{1.0}),
               ArgumentError);
}

TEST(ScanSequential, HandRecurrence) {
  const Params p = scalar_half_decay();
  const std::vector<double> x{1.0, 1.0, 1.0};
  const auto r = scan_sequential<double>(p, x, State::for_params(p));
  const double expected[] = {1.0, 1.5, 1.75};
  for (int t = 0; t < 3; ++t) EXPECT_NEAR(r.y[t], expected[t], 1e-12);
  EXPECT_NEAR(r.h_final.h[0], 1.75, 1e-12);
  EXPECT_EQ(r.h_final.position, 3u);
}

TEST(ScanSequential, ZeroInputZeroOutput) {
  const Params p = random_params(4, 8, 3);
  const std::vector<double> x(4 * 50, 0.0);
  const auto r = scan_sequential<double>(p, x, State::for_params(p));
  for (double v : r.y) EXPECT_EQ(v, 0.0);
}

TEST(ScanSequential, SkipPathIdentity) {
  Params p = random_params(4, 8, 5);
  std::fill(p.w_c.begin(), p.w_c.end(), 0.0);
  std::fill(p.d_skip.begin(), p.d_skip.end(), 1.0);
  const auto x = testing::gaussian(4 * 40, 6);
  const auto r = scan_sequential<double>(p, x, State::for_params(p));
  EXPECT_EQ(r.y, x);
}

TEST(ScanSequential, ShapeErrors) {
  const Params p = random_params(4, 8, 5);
  EXPECT_THROW(scan_sequential<double>(p, std::vector<double>(7), State::for_params(p)),
               ArgumentError);
  EXPECT_THROW(scan_sequential<double>(p, std::vector<double>(8), State::zeros(4, 7)),
               ArgumentError);
}

TEST(ScanStep, FoldMatchesSequentialBitExactly) {
  const Params p = random_params(6, 16, 7);
  const std::size_t len = 257;
  const auto x = testing::gaussian(6 * len, 8);
  const State h0 = random_state(p, 9);
  const auto batch = scan_sequential<double>(p, x, h0);
  State s = h0;
  for (std::size_t t = 0; t < len; ++t) {
    const auto y = scan_step<double>(p, std::span(x).subspan(t * 6, 6), s);
    for (int i = 0; i < 6; ++i) ASSERT_EQ(y[i], batch.y[t * 6 + i]);
  }
  EXPECT_EQ(s.h, batch.h_final.h);
  EXPECT_EQ(s.position, batch.h_final.position);
}

TEST(ScanStep, StateSizeIndependentOfSteps) {
  const Params p = random_params(4, 16, 1);
  State s = State::for_params(p);
  const auto x = testing::gaussian(4, 2);
  for (int i = 0; i < 10; ++i) scan_step<double>(p, x, s);
  const auto after_ten = s.serialize().size();
  for (int i = 10; i < 100000; ++i) scan_step<double>(p, x, s);
  EXPECT_EQ(s.serialize().size(), after_ten);
  EXPECT_EQ(s.persistent_bytes(), after_ten);
}

TEST(ScanStep, ZeroInZeroOut) {
  const Params p = random_params(4, 16, 1);
  State s = State::for_params(p);
  const auto y = scan_step<double>(p, std::vector<double>(4, 0.0), s);
  for (double v : y) EXPECT_EQ(v, 0.0);
  for (double v : s.h) EXPECT_EQ(v, 0.0);
}

TEST(ScanChunked, UnitChunkIsBitIdentical) {
  const Params p = random_params(5, 7, 2);
  const auto x = testing::gaussian(5 * 300, 3);
  const State h0 = random_state(p, 4);
  const auto seq = scan_sequential<double>(p, x, h0);
  const auto chk = scan_chunked<double>(p, x, h0, 1);
  EXPECT_EQ(seq.y, chk.y);
  EXPECT_EQ(seq.h_final.h, chk.h_final.h);
}

TEST(ScanChunked, AgreesWithSequentialAcrossChunkSizes) {
  const Params p = random_params(8, 16, 11);
  const std::size_t len = 1024;
  const auto x = testing::gaussian(8 * len, 12);
  const State h0 = random_state(p, 13);
  const auto seq = scan_sequential<double>(p, x, h0);
  for (std::size_t c : {std::size_t{3}, std::size_t{64}, std::size_t{250}, len}) {
    const auto chk = scan_chunked<double>(p, x, h0, c);
    EXPECT_LE(testing::max_abs_diff(seq.y, chk.y), 1e-10) << c;
    EXPECT_LE(testing::max_abs_diff(seq.h_final.h, chk.h_final.h), 1e-10) << c;
  }
  EXPECT_THROW(scan_chunked<double>(p, x, h0, 0), ArgumentError);
}

TEST(ScanChunked, SinglePrecisionTolerance) {
  std::mt19937_64 rng(21);
  const auto p = SsmParams<float>::initialized(8, 16, rng);
  std::normal_distribution<float> n(0.0f, 1.0f);
  std::vector<float> x(8 * 512);
  for (float& v : x) v = n(rng);
  const auto h0 = SsmState<float>::for_params(p);
  const auto seq = scan_sequential<float>(p, x, h0);
  for (std::size_t c : {std::size_t{1}, std::size_t{7}, std::size_t{512}}) {
    const auto chk = scan_chunked<float>(p, x, h0, c);
    float worst = 0.0f;
    for (std::size_t k = 0; k < x.size(); ++k) {
      worst = std::max(worst, std::abs(seq.y[k] - chk.y[k]));
    }
    EXPECT_LE(worst, 1e-5f) << c;
  }
}

TEST(ScanSequential, StateStaysWithinGeometricBound) {
  for (int run = 0; run < 20; ++run) {
    const Params p = random_params(4, 8, 100 + run);
    const std::size_t len = 400;
    const auto x = testing::gaussian(4 * len, 200 + run);
    const State h0 = random_state(p, 300 + run);
    const auto a = continuous_a(p);
    // a_max and the input-term bound measured along the run.
    double a_max = 0.0, drive = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const auto proj = selective_project<double>(p, std::span(x).subspan(t * 4, 4));
      const auto z = discretize<double>(proj.delta, a, proj.b);
      for (std::size_t k = 0; k < z.a_bar.size(); ++k) {
        a_max = std::max(a_max, z.a_bar[k]);
        drive = std::max(drive, std::abs(z.b_bar[k] * x[t * 4 + k / 8]));
      }
    }
    double h0_max = 0.0;
    for (double v : h0.h) h0_max = std::max(h0_max, std::abs(v));
    State s = h0;
    for (std::size_t t = 0; t < len; ++t) {
      scan_step<double>(p, std::span(x).subspan(t * 4, 4), s);
      const double bound =
          h0_max * std::pow(a_max, static_cast<double>(t + 1)) + drive / (1.0 - a_max);
      for (double v : s.h) ASSERT_LE(std::abs(v), bound * (1.0 + 1e-12));
    }
  }
}

TEST(ScanBackward, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_LE(worst_scan_gradient_error(seed * 10), testing::kFdTolerance) << seed;
  }
}

TEST(ScanBackward, ZeroUpstreamGradientGivesZero) {
  const Params p = random_params(4, 3, 1);
  const auto x = testing::gaussian(4 * 16, 2);
  const State h0 = random_state(p, 3);
  ScanSaved<double> saved;
  scan_sequential<double>(p, x, h0, &saved);
  const auto g = scan_backward<double>(p, x, h0, std::vector<double>(x.size(), 0.0), saved);
  for (const auto* v : {&g.x, &g.h0, &g.params.a_log, &g.params.d_skip, &g.params.w_b,
                        &g.params.w_c, &g.params.w_delta_down, &g.params.w_delta_up,
                        &g.params.b_delta}) {
    for (double e : *v) EXPECT_EQ(e, 0.0);
  }
}

TEST(ScanBackward, SkipGradientIsInputWeightedSum) {
  const Params p = random_params(4, 3, 1);
  const std::size_t len = 16;
  const auto x = testing::gaussian(4 * len, 2);
  const auto gy = testing::gaussian(4 * len, 3);
  ScanSaved<double> saved;
  scan_sequential<double>(p, x, State::for_params(p), &saved);
  const auto g = scan_backward<double>(p, x, State::for_params(p), gy, saved);
  for (int i = 0; i < 4; ++i) {
    double expected = 0.0;
    for (std::size_t t = len; t-- > 0;) expected += gy[t * 4 + i] * x[t * 4 + i];
    EXPECT_EQ(g.params.d_skip[i], expected);
  }
}

TEST(ScanBackward, MissingActivationsIsContractError) {
  const Params p = random_params(4, 3, 1);
  const auto x = testing::gaussian(8, 2);
  EXPECT_THROW(scan_backward<double>(p, x, State::for_params(p), x, ScanSaved<double>{}),
               ContractError);
}

TEST(SsmState, DumpCsv) {
  State s = State::zeros(2, 2);
  s.h = {1.0, 2.0, 3.0, 4.5};
  EXPECT_EQ(s.dump_csv(), "channel,state_index,value\n0,0,1\n0,1,2\n1,0,3\n1,1,4.5\n");
}

TEST(SsmParams, Initialization) {
  std::mt19937_64 rng(1);
  const Params p = Params::initialized(32, 16, rng);
  EXPECT_EQ(p.d_rank, 2);
  for (int j = 0; j < 16; ++j) EXPECT_NEAR(-std::exp(p.a_log[j]), -(j + 1.0), 1e-12);
  for (double b : p.b_delta) {
    const double dt = softplus(b);
    EXPECT_GE(dt, 1e-3 * (1 - 1e-9));
    EXPECT_LE(dt, 1e-1 * (1 + 1e-9));
  }
}

}  // namespace
}  // namespace aeromamba::ssm
