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
#include "aeromamba/model/mamba_block.hpp"

#include <fmt/format.h>

#include <cmath>

#include "aeromamba/errors.hpp"
#include "aeromamba/ssm.hpp"

namespace aeromamba::model {

int MambaBlockConfig::rank() const {
  return d_rank > 0 ? d_rank : ssm::default_rank(d_inner());
}

void MambaBlockConfig::validate() const {
  if (d_model < 1 || expand < 1 || d_state < 1 || d_rank < 0 || conv_kernel < 1) {
    throw ArgumentError(fmt::format(
        "invalid Mamba block config d_model={} expand={} d_state={} d_rank={} kernel={}",
        d_model, expand, d_state, d_rank, conv_kernel));
  }
}

MambaBlock::MambaBlock(const MambaBlockConfig& config, std::mt19937_64& rng)
    : config_(config) {
  config_.validate();
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto di = static_cast<std::size_t>(config_.d_inner());
  const auto k = static_cast<std::size_t>(config_.conv_kernel);
  norm_gain = constant_parameter({d}, 1.0);
  in_proj = uniform_parameter({2 * di, d}, 1.0 / std::sqrt(static_cast<double>(d)), rng);
  conv_weight = uniform_parameter({di, k}, 1.0 / std::sqrt(static_cast<double>(k)), rng);
  conv_bias = constant_parameter({di}, 0.0);
  const auto p = ssm::SsmParams<double>::initialized(config_.d_inner(), config_.d_state, rng,
                                                     config_.rank());
  const auto n = static_cast<std::size_t>(p.d_state);
  const auto r = static_cast<std::size_t>(p.d_rank);
  auto leaf = [](ad::Shape s, const std::vector<double>& v) { return ad::Tensor(s, v, true); };
  ssm.a_log = leaf({di, n}, p.a_log);
  ssm.d_skip = leaf({di}, p.d_skip);
  ssm.w_b = leaf({n, di}, p.w_b);
  ssm.w_c = leaf({n, di}, p.w_c);
  ssm.w_delta_down = leaf({r, di}, p.w_delta_down);
  ssm.w_delta_up = leaf({di, r}, p.w_delta_up);
  ssm.b_delta = leaf({di}, p.b_delta);
  out_proj = uniform_parameter({d, di}, 1.0 / std::sqrt(static_cast<double>(di)), rng);
}

ad::Tensor MambaBlock::forward(const ad::Tensor& x, Cache* cache) const {
  if (x.rank() != 3 || x.dim(2) != static_cast<std::size_t>(config_.d_model)) {
    throw ArgumentError(fmt::format("mamba block of width {} got input {}", config_.d_model,
                                    ad::shape_string(x.shape())));
  }
  if (x.dim(1) < 1) throw ArgumentError("mamba block needs at least one time step");
  if (cache != nullptr && config_.bidirectional) {
    throw ContractError("a bidirectional block cannot continue a sequence");
  }
  const std::size_t di = config_.d_inner();
  const bool seeded = cache != nullptr && !cache->empty();
  if (seeded && cache->ssm.h.size() != x.dim(0)) {
    throw ContractError(fmt::format("cache holds {} streams, input batch is {}",
                                    cache->ssm.h.size(), x.dim(0)));
  }

  const ad::Tensor proj = ad::linear(ad::rms_norm(x, norm_gain), in_proj);
  const ad::Tensor u_raw = ad::slice(proj, -1, 0, di);
  const ad::Tensor z = ad::slice(proj, -1, di, di);
  ad::ConvHistory next_conv;
  const ad::Tensor u = ad::silu(ad::depthwise_causal_conv1d(
      u_raw, conv_weight, conv_bias, seeded ? &cache->conv : nullptr,
      cache != nullptr ? &next_conv : nullptr));
  ad::ScanStates next_ssm;
  ad::Tensor s = ad::selective_scan(u, ssm, seeded ? &cache->ssm : nullptr,
                                    cache != nullptr ? &next_ssm : nullptr);
  if (config_.bidirectional) {
    s = ad::add(s, ad::reverse(ad::selective_scan(ad::reverse(u, 1), ssm), 1));
  }
  if (cache != nullptr) {
    cache->conv = std::move(next_conv);
    cache->ssm = std::move(next_ssm);
  }
  return ad::add(x, ad::linear(ad::mul(s, ad::silu(z)), out_proj));
}

std::vector<double> MambaBlock::step(std::span<const double> x_t, Cache& cache) const {
  ad::NoGradGuard guard;
  const auto d = static_cast<std::size_t>(config_.d_model);
  if (x_t.size() != d) {
    throw ArgumentError(fmt::format("mamba step expects {} values, got {}", d, x_t.size()));
  }
  const ad::Tensor y =
      forward(ad::Tensor({1, 1, d}, std::vector<double>(x_t.begin(), x_t.end())), &cache);
  return {y.data().begin(), y.data().end()};
}

MambaBlock::Cache MambaBlock::initial_cache(std::size_t batch) const {
  const std::size_t di = config_.d_inner();
  Cache c;
  c.conv.rows.assign(batch * (config_.conv_kernel - 1) * di, 0.0);
  c.ssm.h.assign(batch, std::vector<double>(di * config_.d_state, 0.0));
  return c;
}

std::size_t MambaBlock::cache_bytes() const {
  const std::size_t di = config_.d_inner();
  return sizeof(double) * di * (config_.conv_kernel - 1 + config_.d_state);
}

void MambaBlock::append_parameters(const std::string& prefix, ParameterList& out) const {
  out.push_back({prefix + "norm.gain", norm_gain});
  out.push_back({prefix + "in_proj.weight", in_proj});
  out.push_back({prefix + "conv.weight", conv_weight});
  out.push_back({prefix + "conv.bias", conv_bias});
  out.push_back({prefix + "ssm.a_log", ssm.a_log});
  out.push_back({prefix + "ssm.d_skip", ssm.d_skip});
  out.push_back({prefix + "ssm.w_b", ssm.w_b});
  out.push_back({prefix + "ssm.w_c", ssm.w_c});
  out.push_back({prefix + "ssm.w_delta_down", ssm.w_delta_down});
  out.push_back({prefix + "ssm.w_delta_up", ssm.w_delta_up});
  out.push_back({prefix + "ssm.b_delta", ssm.b_delta});
  out.push_back({prefix + "out_proj.weight", out_proj});
}

std::vector<LayerCount> MambaBlock::parameter_report(const MambaBlockConfig& c) {
  c.validate();
  const std::size_t d = c.d_model, di = c.d_inner(), n = c.d_state, r = c.rank();
  const std::size_t k = c.conv_kernel;
  return {{"norm.gain", d},         {"in_proj.weight", 2 * di * d},
          {"conv.weight", di * k},  {"conv.bias", di},
          {"ssm.a_log", di * n},    {"ssm.d_skip", di},
          {"ssm.w_b", n * di},      {"ssm.w_c", n * di},
          {"ssm.w_delta_down", r * di}, {"ssm.w_delta_up", di * r},
          {"ssm.b_delta", di},      {"out_proj.weight", d * di}};
}

std::size_t MambaBlock::parameter_count(const MambaBlockConfig& c) {
  std::size_t total = 0;
  for (const auto& t : parameter_report(c)) total += t.count;
  return total;
}

}  // namespace aeromamba::model
