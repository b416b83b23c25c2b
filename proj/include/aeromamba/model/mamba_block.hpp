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
#ifndef AEROMAMBA_MODEL_MAMBA_BLOCK_HPP_
#define AEROMAMBA_MODEL_MAMBA_BLOCK_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/model/parameters.hpp"

namespace aeromamba::model {

struct MambaBlockConfig {
  int d_model = 64;
  int expand = 2;
  int d_state = 16;
  int d_rank = 0;  // 0 selects max(1, d_inner / 16)
  int conv_kernel = 4;
  // Adds a time-reversed pass of the same scan. Not causal, so streaming
  // refuses blocks built with it.
  bool bidirectional = false;

  int d_inner() const { return expand * d_model; }
  int rank() const;
  void validate() const;
};

// Pre-norm gated selective-SSM block with a residual connection:
//   (u, z) = split(in_proj(rms_norm(x)))
//   y = x + out_proj(ssm(silu(causal_conv(u))) * silu(z))
// Sequences are [B, L, d_model].
class MambaBlock {
 public:
  // Carried context of a sequence: the last kernel-1 conv inputs and the scan
  // state, per batch item.
  struct Cache {
    ad::ConvHistory conv;
    ad::ScanStates ssm;
    bool empty() const { return ssm.h.empty(); }
  };

  MambaBlock(const MambaBlockConfig& config, std::mt19937_64& rng);

  // When cache is given, a non-empty cache seeds the sequence start and on
  // return holds the context after its end.
  ad::Tensor forward(const ad::Tensor& x, Cache* cache = nullptr) const;

  // One time step for a single stream; bit-identical to forward.
  std::vector<double> step(std::span<const double> x_t, Cache& cache) const;

  // Zero cache for a batch of the given size.
  Cache initial_cache(std::size_t batch) const;
  // Bytes of one stream's cache, from the config alone.
  std::size_t cache_bytes() const;

  const MambaBlockConfig& config() const { return config_; }
  void append_parameters(const std::string& prefix, ParameterList& out) const;
  static std::vector<LayerCount> parameter_report(const MambaBlockConfig& config);
  static std::size_t parameter_count(const MambaBlockConfig& config);

  ad::Tensor norm_gain, in_proj, conv_weight, conv_bias, out_proj;
  ad::SsmTensors ssm;

 private:
  MambaBlockConfig config_;
};

}  // namespace aeromamba::model

#endif  // AEROMAMBA_MODEL_MAMBA_BLOCK_HPP_
