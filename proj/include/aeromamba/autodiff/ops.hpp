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
#ifndef AEROMAMBA_AUTODIFF_OPS_HPP_
#define AEROMAMBA_AUTODIFF_OPS_HPP_

#include <cstddef>
#include <vector>

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/dsp/stft.hpp"

namespace aeromamba::ad {

// Elementwise arithmetic. Operands must have equal shapes, except that b may
// be a single-element tensor.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double value);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
// mean |x - y|; the derivative of |0| is taken as 0.
Tensor l1(const Tensor& x, const Tensor& y);

Tensor relu(const Tensor& x);
Tensor leaky_relu(const Tensor& x, double slope);
Tensor silu(const Tensor& x);
Tensor softplus(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Splits axis in halves (a, b) and returns a * sigmoid(b).
Tensor glu(const Tensor& x, int axis);

// x: [..., in], w: [out, in], b: [out] or undefined. Each output row is
// accumulated in input order, so results do not depend on the row count.
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b = {});
// Normalizes the last axis by its root mean square, then scales by gain.
Tensor rms_norm(const Tensor& x, const Tensor& gain, double eps = 1e-5);

Tensor reshape(const Tensor& x, Shape shape);
Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice(const Tensor& x, int axis, std::size_t begin, std::size_t length);
// Zero padding appended along axis.
Tensor pad_end(const Tensor& x, int axis, std::size_t count);
Tensor reverse(const Tensor& x, int axis);
// Swaps the last two axes.
Tensor transpose_last(const Tensor& x);

// x: [B, C_in, T], w: [C_out, C_in / groups, K], b: [C_out] or undefined.
// Symmetric zero padding.
Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b, int stride = 1,
              int padding = 0, int groups = 1);
// x: [B, C_in, T], w: [C_in, C_out, K]; output length (T - 1) * stride + K.
Tensor conv_transpose1d(const Tensor& x, const Tensor& w, const Tensor& b,
                        int stride);

// Rows that precede a causal sequence: [B, K - 1, C], row-major.
struct ConvHistory {
  std::vector<double> rows;
};

// x: [B, T, C], w: [C, K], b: [C]. Output t sees inputs t-K+1 .. t. Missing
// history is zeros. When history_out is given it receives the last K - 1
// rows of the extended input for continuing the sequence.
Tensor depthwise_causal_conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
                               const ConvHistory* history = nullptr,
                               ConvHistory* history_out = nullptr);

// x: [B, C, T]; windows that overhang the padding average only the samples
// they cover.
Tensor avg_pool1d(const Tensor& x, int kernel, int stride, int padding);

// Selective-scan parameters as graph tensors. Shapes follow
// ssm::SsmParams: a_log [d, n], d_skip [d], w_b [n, d], w_c [n, d],
// w_delta_down [r, d], w_delta_up [d, r], b_delta [d].
struct SsmTensors {
  Tensor a_log, d_skip, w_b, w_c, w_delta_down, w_delta_up, b_delta;

  std::vector<Tensor> all() const {
    return {a_log, d_skip, w_b, w_c, w_delta_down, w_delta_up, b_delta};
  }
};

// Per-item recurrent states, B x (d * n) values each.
struct ScanStates {
  std::vector<std::vector<double>> h;
};

// x: [B, L, d]. Runs the sequential scan per batch item; initial states
// default to zero.
Tensor selective_scan(const Tensor& x, const SsmTensors& params,
                      const ScanStates* initial = nullptr,
                      ScanStates* final_states = nullptr);

// x: [B, N] -> [B, 2 * bins, frames]; real parts first, then imaginary.
Tensor stft(const Tensor& x, const dsp::StftConfig& config);
// Inverse of stft for signals of the given length.
Tensor istft(const Tensor& spec, const dsp::StftConfig& config,
             std::size_t length);
// [B, 2 * bins, F] -> [B, bins, F]: 0.5 * log(re^2 + im^2 + eps).
Tensor log_magnitude(const Tensor& spec, double eps);

}  // namespace aeromamba::ad

#endif  // AEROMAMBA_AUTODIFF_OPS_HPP_
