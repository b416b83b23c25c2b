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
#include "aeromamba/model/generator.hpp"

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::model {

namespace pt = boost::property_tree;

namespace {

// Reads key into out when present; unparsable values are errors.
template <typename T>
void read_key(const pt::ptree& section, const char* key, T& out) {
  const auto child = section.get_child_optional(key);
  if (!child) return;
  try {
    out = child->get_value<T>();
  } catch (const pt::ptree_bad_data&) {
    throw ArgumentError(fmt::format("config: bad value '{}' for '{}'", child->data(), key));
  }
}

}  // namespace

void GeneratorConfig::validate() const {
  stft.validate();
  if (depth < 1 || base_channels < 1 || max_channels < base_channels || stride < 1 ||
      d_state < 1 || d_rank < 0) {
    throw ArgumentError(fmt::format(
        "invalid generator config depth={} base_channels={} max_channels={} stride={} "
        "d_state={} d_rank={}",
        depth, base_channels, max_channels, stride, d_state, d_rank));
  }
}

int GeneratorConfig::channels(int level) const {
  long c = base_channels;
  for (int l = 0; l < level && c < max_channels; ++l) c *= 2;
  return static_cast<int>(std::min<long>(c, max_channels));
}

std::size_t GeneratorConfig::frame_multiple() const {
  std::size_t m = 1;
  for (int l = 0; l < depth; ++l) m *= static_cast<std::size_t>(stride);
  return m;
}

MambaBlockConfig GeneratorConfig::block_config(int level) const {
  MambaBlockConfig b;
  b.d_model = channels(level + 1);
  b.d_state = d_state;
  b.d_rank = d_rank;
  b.bidirectional = bidirectional;
  return b;
}

std::string GeneratorConfig::to_text() const {
  return fmt::format(
      "[generator]\nwindow_size = {}\nhop_length = {}\ndepth = {}\nbase_channels = {}\n"
      "max_channels = {}\nstride = {}\nd_state = {}\nd_rank = {}\nbidirectional = {}\n",
      stft.window_size, stft.hop_length, depth, base_channels, max_channels, stride, d_state,
      d_rank, bidirectional ? "true" : "false");
}

GeneratorConfig GeneratorConfig::from_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ArgumentError(fmt::format("generator config: {}", e.message()));
  }
  GeneratorConfig c;
  const auto section = tree.get_child_optional("generator");
  if (!section) return c;
  static const std::set<std::string> known{"window_size", "hop_length", "depth",
                                           "base_channels", "max_channels", "stride",
                                           "d_state", "d_rank", "bidirectional"};
  for (const auto& [key, value] : *section) {
    if (!known.contains(key)) {
      throw ArgumentError(fmt::format("generator config: unknown key '{}'", key));
    }
  }
  try {
    read_key(*section, "window_size", c.stft.window_size);
    read_key(*section, "hop_length", c.stft.hop_length);
    read_key(*section, "depth", c.depth);
    read_key(*section, "base_channels", c.base_channels);
    read_key(*section, "max_channels", c.max_channels);
    read_key(*section, "stride", c.stride);
    read_key(*section, "d_state", c.d_state);
    read_key(*section, "d_rank", c.d_rank);
    read_key(*section, "bidirectional", c.bidirectional);
  } catch (const pt::ptree_bad_data& e) {
    throw ArgumentError(fmt::format("generator config: {}", e.what()));
  }
  c.validate();
  return c;
}

namespace {

Generator::Conv make_conv(ad::Shape shape, std::size_t bias_len, std::size_t fan_in,
                          std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Generator::Conv c;
  c.weight = uniform_parameter(std::move(shape), bound, rng);
  c.bias = uniform_parameter({bias_len}, bound, rng);
  return c;
}

}  // namespace

Generator::Generator(const GeneratorConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(seed);
  const auto spec_ch = static_cast<std::size_t>(config_.spectral_channels());
  const auto s = static_cast<std::size_t>(config_.stride);
  const auto c0 = static_cast<std::size_t>(config_.channels(0));
  in_conv = make_conv({c0, spec_ch, 1}, c0, spec_ch, rng);
  for (int l = 0; l < config_.depth; ++l) {
    const auto ci = static_cast<std::size_t>(config_.channels(l));
    const auto co = static_cast<std::size_t>(config_.channels(l + 1));
    encoders.push_back(make_conv({2 * co, ci, s}, 2 * co, ci * s, rng));
    blocks_.emplace_back(config_.block_config(l), rng);
  }
  for (int l = 0; l < config_.depth; ++l) {
    const auto ci = static_cast<std::size_t>(config_.channels(l + 1));
    const auto co = static_cast<std::size_t>(config_.channels(l));
    decoders.push_back(make_conv({ci, 2 * co, s}, 2 * co, ci, rng));
  }
  // Zero output projection: an untrained generator returns its input.
  out_conv.weight = constant_parameter({spec_ch, c0, 1}, 0.0);
  out_conv.bias = constant_parameter({spec_ch}, 0.0);
}

std::vector<ad::Tensor> Generator::encode(const ad::Tensor& spec, Caches* caches) const {
  if (spec.rank() != 3 || spec.dim(1) != static_cast<std::size_t>(config_.spectral_channels())) {
    throw ArgumentError(fmt::format("generator expects [B, {}, F] spectrograms, got {}",
                                    config_.spectral_channels(), ad::shape_string(spec.shape())));
  }
  if (spec.dim(2) == 0 || spec.dim(2) % config_.frame_multiple() != 0) {
    throw ArgumentError(fmt::format("frame count {} is not a positive multiple of {}",
                                    spec.dim(2), config_.frame_multiple()));
  }
  if (caches != nullptr && caches->blocks.size() != blocks_.size()) {
    throw ContractError(fmt::format("{} block caches for {} blocks", caches->blocks.size(),
                                    blocks_.size()));
  }
  std::vector<ad::Tensor> acts;
  ad::Tensor h = ad::conv1d(spec, in_conv.weight, in_conv.bias);
  acts.push_back(h);
  for (int l = 0; l < config_.depth; ++l) {
    h = ad::glu(ad::conv1d(h, encoders[l].weight, encoders[l].bias, config_.stride), 1);
    h = ad::transpose_last(blocks_[l].forward(ad::transpose_last(h),
                                              caches ? &caches->blocks[l] : nullptr));
    acts.push_back(h);
  }
  return acts;
}

ad::Tensor Generator::forward_frames(const ad::Tensor& spec, Caches* caches) const {
  const std::vector<ad::Tensor> acts = encode(spec, caches);
  ad::Tensor h = acts.back();
  for (int l = config_.depth - 1; l >= 0; --l) {
    if (l < config_.depth - 1) h = ad::add(h, acts[l + 1]);
    h = ad::glu(ad::conv_transpose1d(h, decoders[l].weight, decoders[l].bias, config_.stride), 1);
  }
  h = ad::add(h, acts[0]);
  return ad::add(spec, ad::conv1d(h, out_conv.weight, out_conv.bias));
}

ad::Tensor Generator::forward(const ad::Tensor& wave) const {
  if (wave.rank() != 2) {
    throw ArgumentError(fmt::format("generator expects [B, N] waveforms, got {}",
                                    ad::shape_string(wave.shape())));
  }
  const std::size_t length = wave.dim(1);
  if (length < static_cast<std::size_t>(config_.stft.window_size)) {
    throw ArgumentError(fmt::format("input of {} samples is shorter than one STFT frame ({})",
                                    length, config_.stft.window_size));
  }
  const ad::Tensor spec = ad::stft(wave, config_.stft);
  const std::size_t frames = spec.dim(2);
  const std::size_t m = config_.frame_multiple();
  const std::size_t padded = (frames + m - 1) / m * m;
  const ad::Tensor out = forward_frames(ad::pad_end(spec, 2, padded - frames));
  return ad::istft(ad::slice(out, 2, 0, frames), config_.stft, length);
}

dsp::AudioBuffer Generator::enhance(const dsp::AudioBuffer& input) const {
  ad::NoGradGuard guard;
  std::vector<std::vector<double>> channels;
  for (std::size_t c = 0; c < input.num_channels(); ++c) {
    const auto x = input.channel(c);
    const ad::Tensor y =
        forward(ad::Tensor({1, x.size()}, std::vector<double>(x.begin(), x.end())));
    channels.emplace_back(y.data().begin(), y.data().end());
  }
  return dsp::AudioBuffer(std::move(channels), input.sample_rate());
}

Generator::Caches Generator::initial_caches(std::size_t batch) const {
  Caches c;
  for (const auto& b : blocks_) c.blocks.push_back(b.initial_cache(batch));
  return c;
}

std::size_t Generator::cache_bytes() const {
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.cache_bytes();
  return n;
}

ParameterList Generator::parameters() const {
  ParameterList out;
  out.push_back({"in_conv.weight", in_conv.weight});
  out.push_back({"in_conv.bias", in_conv.bias});
  for (int l = 0; l < config_.depth; ++l) {
    const std::string p = fmt::format("encoder.{}.", l);
    out.push_back({p + "conv.weight", encoders[l].weight});
    out.push_back({p + "conv.bias", encoders[l].bias});
    blocks_[l].append_parameters(p + "mamba.", out);
  }
  for (int l = config_.depth - 1; l >= 0; --l) {
    const std::string p = fmt::format("decoder.{}.", l);
    out.push_back({p + "conv.weight", decoders[l].weight});
    out.push_back({p + "conv.bias", decoders[l].bias});
  }
  out.push_back({"out_conv.weight", out_conv.weight});
  out.push_back({"out_conv.bias", out_conv.bias});
  return out;
}

std::vector<LayerCount> Generator::parameter_report(const GeneratorConfig& config) {
  config.validate();
  const std::size_t spec_ch = config.spectral_channels();
  const std::size_t s = config.stride;
  const std::size_t c0 = config.channels(0);
  std::vector<LayerCount> out;
  out.push_back({"in_conv.weight", c0 * spec_ch});
  out.push_back({"in_conv.bias", c0});
  for (int l = 0; l < config.depth; ++l) {
    const std::size_t ci = config.channels(l), co = config.channels(l + 1);
    const std::string p = fmt::format("encoder.{}.", l);
    out.push_back({p + "conv.weight", 2 * co * ci * s});
    out.push_back({p + "conv.bias", 2 * co});
    for (auto& t : MambaBlock::parameter_report(config.block_config(l))) {
      out.push_back({p + "mamba." + t.name, t.count});
    }
  }
  for (int l = config.depth - 1; l >= 0; --l) {
    const std::size_t ci = config.channels(l + 1), co = config.channels(l);
    const std::string p = fmt::format("decoder.{}.", l);
    out.push_back({p + "conv.weight", ci * 2 * co * s});
    out.push_back({p + "conv.bias", 2 * co});
  }
  out.push_back({"out_conv.weight", spec_ch * c0});
  out.push_back({"out_conv.bias", spec_ch});
  return out;
}

std::size_t Generator::parameter_count(const GeneratorConfig& config) {
  std::size_t n = 0;
  for (const auto& l : parameter_report(config)) n += l.count;
  return n;
}

}  // namespace aeromamba::model
