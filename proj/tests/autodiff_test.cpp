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
#include <cmath>
#include <random>
#include <vector>

#include "aeromamba/autodiff/adam.hpp"
#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/errors.hpp"
#include "gtest/gtest.h"
#include "op_cases.hpp"
#include "test_util.hpp"

namespace aeromamba::ad {
namespace {

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }
std::vector<double> grads(const Tensor& t) { return {t.grad().begin(), t.grad().end()}; }

TEST(Ops, ActivationsAtOrigin) {
  const Tensor z = Tensor::scalar(0.0);
  EXPECT_EQ(silu(z).item(), 0.0);
  EXPECT_EQ(sigmoid(z).item(), 0.5);
  EXPECT_NEAR(softplus(z).item(), std::log(2.0), 1e-15);
}

TEST(Ops, IdentityConvolutionKernel) {
  const Tensor x({2, 3, 7}, testing::gaussian(42, 1));
  std::vector<double> k(9, 0.0);
  for (int c = 0; c < 3; ++c) k[c * 3 + c] = 1.0;
  const Tensor w({3, 3, 1}, k);
  EXPECT_EQ(values(conv1d(x, w, {})), values(x));
}

TEST(Ops, ShapeMismatchNamesOp) {
  const Tensor a({2, 3}, std::vector<double>(6, 1.0));
  const Tensor b({3, 2}, std::vector<double>(6, 1.0));
  try {
    add(a, b);
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("add"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("[2, 3]"), std::string::npos);
  }
  EXPECT_THROW(linear(a, b), ArgumentError);
  EXPECT_THROW(conv1d(Tensor({1, 2, 3}, std::vector<double>(6)), Tensor({1, 1, 2}, {1, 1}), {}),
               ArgumentError);
}

TEST(Ops, DepthwiseConvIsCausal) {
  // Perturbing a later input never changes an earlier output.
  Tensor x({1, 6, 2}, testing::gaussian(12, 1));
  const Tensor w({2, 4}, testing::gaussian(8, 2));
  const Tensor b({2}, {0.1, -0.2});
  const auto before = values(depthwise_causal_conv1d(x, w, b));
  x.mutable_data()[4 * 2] += 1.0;
  const auto after = values(depthwise_causal_conv1d(x, w, b));
  for (int k = 0; k < 8; ++k) EXPECT_EQ(before[k], after[k]);
  EXPECT_NE(before[8], after[8]);
}

TEST(Ops, DepthwiseConvHistoryContinuesSequence) {
  const Tensor x({1, 10, 3}, testing::gaussian(30, 3));
  const Tensor w({3, 4}, testing::gaussian(12, 4));
  const Tensor b({3}, {0.0, 1.0, 2.0});
  const auto whole = values(depthwise_causal_conv1d(x, w, b));
  ConvHistory h;
  const auto first = values(depthwise_causal_conv1d(slice(x, 1, 0, 6), w, b, nullptr, &h));
  const auto second = values(depthwise_causal_conv1d(slice(x, 1, 6, 4), w, b, &h));
  std::vector<double> joined = first;
  joined.insert(joined.end(), second.begin(), second.end());
  EXPECT_EQ(joined, whole);
}

TEST(Ops, AvgPoolExcludesPadding) {
  const Tensor x({1, 1, 6}, {1, 2, 3, 4, 5, 6});
  // Windows [-1,3), [1,5), [3,7) clipped to the signal.
  EXPECT_EQ(values(avg_pool1d(x, 4, 2, 1)), (std::vector<double>{2.0, 3.5, 5.0}));
}

TEST(Ops, StftMatchesSignalModule) {
  const auto x = testing::gaussian(1000, 5);
  const auto spec = dsp::stft(x, {});
  const Tensor out = stft(Tensor({1, 1000}, x), {});
  const std::size_t frames = spec.frames;
  ASSERT_EQ(out.shape(), (Shape{1, 514, frames}));
  EXPECT_EQ(out.data()[3 * frames + 2], spec.at(2, 3).real());
  EXPECT_EQ(out.data()[(257 + 3) * frames + 2], spec.at(2, 3).imag());
  const Tensor back = istft(out, {}, 1000);
  EXPECT_LE(testing::max_abs_diff(back.data(), x), 1e-9);
}

TEST(Backward, SumGivesOnes) {
  Tensor x({3, 2}, testing::gaussian(6, 1), true);
  backward(sum(x));
  EXPECT_EQ(grads(x), std::vector<double>(6, 1.0));
}

TEST(Backward, L1GivesSignWithZeroAtOrigin) {
  Tensor x({4}, {2.0, -3.0, 0.0, 0.5}, true);
  backward(l1(x, Tensor::zeros({4})));
  EXPECT_EQ(grads(x), (std::vector<double>{0.25, -0.25, 0.0, 0.25}));
}

TEST(Backward, DiamondGraphSumsPaths) {
  // y = x * x + x, dy/dx = 2x + 1.
  Tensor x({3}, {-1.5, 0.0, 2.0}, true);
  backward(sum(add(mul(x, x), x)));
  EXPECT_EQ(grads(x), (std::vector<double>{-2.0, 1.0, 5.0}));
}

TEST(Backward, NonScalarLossRejected) {
  Tensor x({2}, {1.0, 2.0}, true);
  EXPECT_THROW(backward(scale(x, 2.0)), ArgumentError);
}

TEST(Backward, NoGradGuardRecordsNothing) {
  Tensor x({2}, {1.0, 2.0}, true);
  NoGradGuard guard;
  const Tensor y = sum(x);
  EXPECT_FALSE(y.requires_grad());
  EXPECT_TRUE(y.node()->parents.empty());
}

TEST(Backward, Deterministic) {
  std::mt19937_64 rng(1);
  for (const auto& c : testing::op_cases()) {
    auto inst = c.make(rng);
    std::vector<std::vector<double>> first;
    for (int run = 0; run < 2; ++run) {
      for (Tensor& t : inst.inputs) t.clear_grad();
      backward(testing::weighted_loss(inst.op(inst.inputs), 9));
      for (std::size_t i = 0; i < inst.inputs.size(); ++i) {
        if (run == 0) {
          first.push_back(grads(inst.inputs[i]));
        } else {
          EXPECT_EQ(grads(inst.inputs[i]), first[i]) << c.name;
        }
      }
    }
  }
}

TEST(Backward, GradientsAreLinearInLoss) {
  std::mt19937_64 rng(2);
  const double a = 0.7, b = -1.3;
  for (const auto& c : testing::op_cases()) {
    auto inst = c.make(rng);
    auto grads_of = [&](double wa, double wb) {
      for (Tensor& t : inst.inputs) t.clear_grad();
      const Tensor out = inst.op(inst.inputs);
      backward(add(scale(testing::weighted_loss(out, 1), wa),
                   scale(testing::weighted_loss(out, 2), wb)));
      std::vector<std::vector<double>> g;
      for (Tensor& t : inst.inputs) g.push_back(t.has_grad() ? grads(t) : std::vector<double>(t.size()));
      return g;
    };
    const auto ga = grads_of(1.0, 0.0);
    const auto gb = grads_of(0.0, 1.0);
    const auto gc = grads_of(a, b);
    for (std::size_t i = 0; i < gc.size(); ++i) {
      for (std::size_t k = 0; k < gc[i].size(); ++k) {
        EXPECT_NEAR(gc[i][k], a * ga[i][k] + b * gb[i][k], 1e-12) << c.name;
      }
    }
  }
}

TEST(Backward, RepeatedSweepsAccumulate) {
  Tensor x({2}, {1.0, 3.0}, true);
  const Tensor loss = sum(mul(x, x));
  backward(loss);
  backward(loss);
  EXPECT_EQ(grads(x), (std::vector<double>{4.0, 12.0}));
}

class OpGradient : public ::testing::TestWithParam<testing::OpCase> {};

TEST_P(OpGradient, MatchesFiniteDifferences) {
  const auto& c = GetParam();
  std::mt19937_64 rng(std::hash<std::string>{}(c.name) & 0xffff);
  for (int instance = 0; instance < 20; ++instance) {
    const double err = testing::op_gradient_error(c.make(rng), 1000 + instance);
    EXPECT_LE(err, testing::kFdTolerance) << c.name << " instance " << instance;
  }
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradient, ::testing::ValuesIn(testing::op_cases()),
                         [](const auto& info) { return info.param.name; });

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor p({3}, {1.0, -2.0, 0.5}, true);
  Adam opt({p});
  for (double& g : p.mutable_grad()) g = 1.0;
  opt.step();
  const double delta = -3e-4 * (1.0 / (1.0 + 1e-8));
  EXPECT_NEAR(p.data()[0], 1.0 + delta, 1e-15);
  EXPECT_NEAR(p.data()[1], -2.0 + delta, 1e-15);
  EXPECT_FALSE(p.has_grad());
  EXPECT_EQ(opt.steps(), 1u);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Tensor p({2}, {1.0, 2.0}, true);
  Adam opt({p});
  p.mutable_grad();
  opt.step();
  EXPECT_EQ(values(p), (std::vector<double>{1.0, 2.0}));
}

TEST(Adam, MissingGradientIsContractError) {
  Tensor p({2}, {1.0, 2.0}, true);
  Adam opt({p});
  EXPECT_THROW(opt.step(), ContractError);
}

TEST(Adam, ReproducibleFromSameState) {
  auto run = [] {
    Tensor p({4}, {0.1, 0.2, 0.3, 0.4}, true);
    Adam opt({p});
    for (int s = 0; s < 5; ++s) {
      backward(sum(mul(p, p)));
      opt.step();
    }
    return values(p);
  };
  EXPECT_EQ(run(), run());
}

TEST(Adam, ClipGradNorm) {
  Tensor p({2}, {0.0, 0.0}, true);
  p.mutable_grad()[0] = 3.0;
  p.mutable_grad()[1] = 4.0;
  std::vector<Tensor> ps{p};
  EXPECT_EQ(clip_grad_norm(ps, 1.0), 5.0);
  EXPECT_NEAR(grad_norm(ps), 1.0, 1e-15);
  EXPECT_EQ(clip_grad_norm(ps, 10.0), grad_norm(ps));
}

}  // namespace
}  // namespace aeromamba::ad
