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
#ifndef AEROMAMBA_TESTS_OP_CASES_HPP_
#define AEROMAMBA_TESTS_OP_CASES_HPP_

// Random small instances of every differentiable op, checked against central
// finite differences. Shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "aeromamba/autodiff/ops.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

namespace aeromamba::testing {

using ad::Shape;
using ad::Tensor;
using OpFn = std::function<Tensor(const std::vector<Tensor>&)>;

struct OpInstance {
  std::vector<Tensor> inputs;  // leaves; those requiring grad are checked
  OpFn op;
};

struct OpCase {
  std::string name;
  std::function<OpInstance(std::mt19937_64&)> make;
};

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Normal values kept at least 1e-2 away from zero so kinks at the origin are
// never straddled by the finite-difference stencil.
inline Tensor random_leaf(std::mt19937_64& rng, Shape shape, double sigma = 1.0,
                          bool requires_grad = true) {
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<double> v(ad::numel(shape));
  for (double& x : v) {
    x = n(rng);
    if (std::abs(x) < 1e-2) x = x < 0 ? -0.1 : 0.1;
  }
  return Tensor(std::move(shape), std::move(v), requires_grad);
}

inline Shape random_shape(std::mt19937_64& rng, std::size_t max_elems = 64) {
  const std::size_t rank = pick(rng, 1, 3);
  Shape s;
  std::size_t total = 1;
  for (std::size_t k = 0; k < rank; ++k) {
    const std::size_t d = pick(rng, 1, std::max<std::size_t>(1, std::min<std::size_t>(6, max_elems / total)));
    s.push_back(d);
    total *= d;
  }
  return s;
}

// Weighted-sum loss so every output element carries a distinct adjoint.
inline Tensor weighted_loss(const Tensor& out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Tensor r = random_leaf(rng, out.shape(), 1.0, false);
  return ad::sum(ad::mul(out, r));
}

// Max relative error over every input requiring a gradient.
inline double op_gradient_error(OpInstance inst, std::uint64_t loss_seed) {
  {
    const Tensor loss = weighted_loss(inst.op(inst.inputs), loss_seed);
    ad::backward(loss);
  }
  double worst = 0.0;
  for (Tensor& leaf : inst.inputs) {
    if (!leaf.requires_grad()) continue;
    const std::vector<double> analytic = leaf.has_grad()
        ? std::vector<double>(leaf.grad().begin(), leaf.grad().end())
        : std::vector<double>(leaf.size(), 0.0);
    auto f = [&] {
      ad::NoGradGuard guard;
      return weighted_loss(inst.op(inst.inputs), loss_seed).item();
    };
    worst = std::max(worst, max_fd_error(leaf.mutable_data(), analytic, f));
  }
  return worst;
}

inline dsp::StftConfig tiny_stft() { return {8, 4}; }

inline std::vector<OpCase> op_cases() {
  using namespace ad;
  auto unary = [](std::string name, std::function<Tensor(const Tensor&)> f) {
    return OpCase{name, [f](std::mt19937_64& rng) {
                    return OpInstance{{random_leaf(rng, random_shape(rng))},
                                      [f](const std::vector<Tensor>& in) { return f(in[0]); }};
                  }};
  };
  auto binary = [](std::string name, std::function<Tensor(const Tensor&, const Tensor&)> f,
                   bool scalar_b) {
    return OpCase{name, [f, scalar_b](std::mt19937_64& rng) {
                    const Shape s = random_shape(rng);
                    return OpInstance{{random_leaf(rng, s), random_leaf(rng, scalar_b ? Shape{1} : s)},
                                      [f](const std::vector<Tensor>& in) { return f(in[0], in[1]); }};
                  }};
  };
  std::vector<OpCase> cases;
  cases.push_back(binary("add", add, false));
  cases.push_back(binary("add_scalar_tensor", add, true));
  cases.push_back(binary("sub", sub, false));
  cases.push_back(binary("mul", mul, false));
  cases.push_back(binary("mul_scalar_tensor", mul, true));
  cases.push_back(binary("l1", l1, false));
  cases.push_back(unary("scale", [](const Tensor& x) { return scale(x, -1.7); }));
  cases.push_back(unary("add_scalar", [](const Tensor& x) { return add_scalar(x, 0.3); }));
  cases.push_back(unary("sum", [](const Tensor& x) { return sum(x); }));
  cases.push_back(unary("mean", [](const Tensor& x) { return mean(x); }));
  cases.push_back(unary("relu", relu));
  cases.push_back(unary("leaky_relu", [](const Tensor& x) { return leaky_relu(x, 0.2); }));
  cases.push_back(unary("silu", silu));
  cases.push_back(unary("softplus", softplus));
  cases.push_back(unary("sigmoid", sigmoid));
  cases.push_back(unary("reverse", [](const Tensor& x) { return reverse(x, 0); }));
  cases.push_back(unary("reshape", [](const Tensor& x) { return reshape(x, {x.size()}); }));
  cases.push_back({"glu", [](std::mt19937_64& rng) {
                     Shape s = random_shape(rng, 32);
                     const std::size_t axis = pick(rng, 0, s.size() - 1);
                     s[axis] *= 2;
                     return OpInstance{{random_leaf(rng, s)}, [axis](const std::vector<Tensor>& in) {
                                         return glu(in[0], static_cast<int>(axis));
                                       }};
                   }});
  cases.push_back({"transpose_last", [](std::mt19937_64& rng) {
                     return OpInstance{{random_leaf(rng, {pick(rng, 1, 3), pick(rng, 1, 4), pick(rng, 1, 5)})},
                                       [](const std::vector<Tensor>& in) { return transpose_last(in[0]); }};
                   }});
  cases.push_back({"linear", [](std::mt19937_64& rng) {
                     const std::size_t rows = pick(rng, 1, 4), in = pick(rng, 1, 6), out = pick(rng, 1, 6);
                     const bool bias = pick(rng, 0, 1) == 1;
                     std::vector<Tensor> leaves{random_leaf(rng, {rows, in}), random_leaf(rng, {out, in})};
                     if (bias) leaves.push_back(random_leaf(rng, {out}));
                     return OpInstance{leaves, [bias](const std::vector<Tensor>& v) {
                                         return linear(v[0], v[1], bias ? v[2] : Tensor());
                                       }};
                   }});
  cases.push_back({"rms_norm", [](std::mt19937_64& rng) {
                     const std::size_t rows = pick(rng, 1, 6), c = pick(rng, 1, 8);
                     return OpInstance{{random_leaf(rng, {rows, c}), random_leaf(rng, {c})},
                                       [](const std::vector<Tensor>& v) { return rms_norm(v[0], v[1]); }};
                   }});
  cases.push_back({"concat", [](std::mt19937_64& rng) {
                     Shape a = random_shape(rng, 24);
                     const std::size_t axis = pick(rng, 0, a.size() - 1);
                     Shape b = a;
                     b[axis] = pick(rng, 1, 3);
                     return OpInstance{{random_leaf(rng, a), random_leaf(rng, b)},
                                       [axis](const std::vector<Tensor>& v) {
                                         return concat({v[0], v[1]}, static_cast<int>(axis));
                                       }};
                   }});
  cases.push_back({"slice", [](std::mt19937_64& rng) {
                     const Shape s = random_shape(rng);
                     const std::size_t axis = pick(rng, 0, s.size() - 1);
                     const std::size_t begin = pick(rng, 0, s[axis] - 1);
                     const std::size_t len = pick(rng, 1, s[axis] - begin);
                     return OpInstance{{random_leaf(rng, s)}, [=](const std::vector<Tensor>& v) {
                                         return slice(v[0], static_cast<int>(axis), begin, len);
                                       }};
                   }});
  cases.push_back({"pad_end", [](std::mt19937_64& rng) {
                     const Shape s = random_shape(rng, 32);
                     const std::size_t axis = pick(rng, 0, s.size() - 1);
                     const std::size_t count = pick(rng, 1, 3);
                     return OpInstance{{random_leaf(rng, s)}, [=](const std::vector<Tensor>& v) {
                                         return pad_end(v[0], static_cast<int>(axis), count);
                                       }};
                   }});
  cases.push_back({"conv1d", [](std::mt19937_64& rng) {
                     const std::size_t groups = pick(rng, 1, 2);
                     const std::size_t cin = groups * pick(rng, 1, 2), cout = groups * pick(rng, 1, 2);
                     const std::size_t k = pick(rng, 1, 3);
                     const int stride = static_cast<int>(pick(rng, 1, 2));
                     const int padding = static_cast<int>(pick(rng, 0, k - 1));
                     const std::size_t t = pick(rng, k, 8);
                     const bool bias = pick(rng, 0, 1) == 1;
                     std::vector<Tensor> leaves{random_leaf(rng, {pick(rng, 1, 2), cin, t}),
                                                random_leaf(rng, {cout, cin / groups, k})};
                     if (bias) leaves.push_back(random_leaf(rng, {cout}));
                     return OpInstance{leaves, [=](const std::vector<Tensor>& v) {
                                         return conv1d(v[0], v[1], bias ? v[2] : Tensor(), stride,
                                                       padding, static_cast<int>(groups));
                                       }};
                   }});
  cases.push_back({"conv_transpose1d", [](std::mt19937_64& rng) {
                     const std::size_t cin = pick(rng, 1, 3), cout = pick(rng, 1, 3), k = pick(rng, 1, 4);
                     const int stride = static_cast<int>(pick(rng, 1, 4));
                     return OpInstance{{random_leaf(rng, {pick(rng, 1, 2), cin, pick(rng, 1, 5)}),
                                        random_leaf(rng, {cin, cout, k}), random_leaf(rng, {cout})},
                                       [=](const std::vector<Tensor>& v) {
                                         return conv_transpose1d(v[0], v[1], v[2], stride);
                                       }};
                   }});
  cases.push_back({"depthwise_causal_conv1d", [](std::mt19937_64& rng) {
                     const std::size_t b = pick(rng, 1, 2), t = pick(rng, 1, 6), c = pick(rng, 1, 4);
                     const bool with_history = pick(rng, 0, 1) == 1;
                     ConvHistory h{gaussian(b * 3 * c, rng())};
                     return OpInstance{{random_leaf(rng, {b, t, c}), random_leaf(rng, {c, 4}),
                                        random_leaf(rng, {c})},
                                       [=](const std::vector<Tensor>& v) {
                                         return depthwise_causal_conv1d(v[0], v[1], v[2],
                                                                        with_history ? &h : nullptr);
                                       }};
                   }});
  cases.push_back({"avg_pool1d", [](std::mt19937_64& rng) {
                     return OpInstance{{random_leaf(rng, {pick(rng, 1, 2), pick(rng, 1, 3), pick(rng, 4, 10)})},
                                       [](const std::vector<Tensor>& v) { return avg_pool1d(v[0], 4, 2, 1); }};
                   }});
  cases.push_back({"selective_scan", [](std::mt19937_64& rng) {
                     const std::size_t d = pick(rng, 1, 4), n = pick(rng, 1, 3), len = pick(rng, 1, 6);
                     const bool with_state = pick(rng, 0, 1) == 1;
                     const std::size_t b = pick(rng, 1, 2);
                     ScanStates h0;
                     for (std::size_t i = 0; i < b; ++i) h0.h.push_back(gaussian(d * n, rng(), 0.5));
                     std::vector<Tensor> leaves{
                         random_leaf(rng, {b, len, d}),       random_leaf(rng, {d, n}, 0.3),
                         random_leaf(rng, {d}),               random_leaf(rng, {n, d}, 0.5),
                         random_leaf(rng, {n, d}, 0.5),       random_leaf(rng, {1, d}, 0.5),
                         random_leaf(rng, {d, 1}, 0.5),       random_leaf(rng, {d}, 0.5)};
                     return OpInstance{leaves, [=](const std::vector<Tensor>& v) {
                                         return selective_scan(
                                             v[0], {v[1], v[2], v[3], v[4], v[5], v[6], v[7]},
                                             with_state ? &h0 : nullptr);
                                       }};
                   }});
  cases.push_back({"stft", [](std::mt19937_64& rng) {
                     return OpInstance{{random_leaf(rng, {pick(rng, 1, 2), pick(rng, 1, 12)})},
                                       [](const std::vector<Tensor>& v) { return stft(v[0], tiny_stft()); }};
                   }});
  cases.push_back({"istft", [](std::mt19937_64& rng) {
                     const std::size_t len = pick(rng, 1, 12);
                     const std::size_t frames = dsp::stft_frame_count(len, tiny_stft());
                     return OpInstance{{random_leaf(rng, {1, 2 * tiny_stft().bins(), frames})},
                                       [len](const std::vector<Tensor>& v) {
                                         return istft(v[0], tiny_stft(), len);
                                       }};
                   }});
  cases.push_back({"log_magnitude", [](std::mt19937_64& rng) {
                     return OpInstance{{random_leaf(rng, {pick(rng, 1, 2), 2 * pick(rng, 1, 4), pick(rng, 1, 4)})},
                                       [](const std::vector<Tensor>& v) { return log_magnitude(v[0], 1e-7); }};
                   }});
  return cases;
}

}  // namespace aeromamba::testing

#endif  // AEROMAMBA_TESTS_OP_CASES_HPP_
