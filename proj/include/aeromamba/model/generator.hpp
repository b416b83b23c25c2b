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
#ifndef AEROMAMBA_MODEL_GENERATOR_HPP_
#define AEROMAMBA_MODEL_GENERATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/dsp/audio.hpp"
#include "aeromamba/dsp/stft.hpp"
#include "aeromamba/model/mamba_block.hpp"
#include "aeromamba/model/parameters.hpp"

namespace aeromamba::model {

struct GeneratorConfig {
  dsp::StftConfig stft;
  int depth = 4;
  int base_channels = 32;
  int max_channels = 256;
  int stride = 4;
  int d_state = 16;
  int d_rank = 0;  // 0 selects max(1, d_inner / 16)
  bool bidirectional = false;

  void validate() const;
  // Channel width at level l (0 is the input projection width).
  int channels(int level) const;
  int spectral_channels() const { return 2 * static_cast<int>(stft.bins()); }
  // Frame counts are padded to a multiple of stride^depth.
  std::size_t frame_multiple() const;
  MambaBlockConfig block_config(int level) const;

  // INI text with a [generator] section.
  std::string to_text() const;
  static GeneratorConfig from_text(const std::string& text);

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

// Spectral U-Net: STFT real/imag planes as channels, a 1x1 input projection,
// encoder levels (strided conv, GLU, Mamba block over time), decoder levels
// (transposed conv, GLU) with additive skips, a zero-initialized 1x1 output
// projection added to the input spectrogram, then the inverse STFT.
class Generator {
 public:
  struct Caches {
    std::vector<MambaBlock::Cache> blocks;
  };

  explicit Generator(const GeneratorConfig& config, std::uint64_t seed = 0);

  // [B, N] -> [B, N]; N must be at least one window.
  ad::Tensor forward(const ad::Tensor& wave) const;

  // Network on a spectrogram [B, 2 * bins, F] with F a multiple of
  // frame_multiple(). With caches the Mamba layers continue from (and update)
  // their carried state, so consecutive calls equal one call on the
  // concatenated frames.
  ad::Tensor forward_frames(const ad::Tensor& spec, Caches* caches = nullptr) const;

  // Encoder activations for a padded spectrogram: the input projection then
  // the output of every level.
  std::vector<ad::Tensor> encode(const ad::Tensor& spec, Caches* caches = nullptr) const;

  // Channels are enhanced independently; no graph is recorded.
  dsp::AudioBuffer enhance(const dsp::AudioBuffer& input) const;

  Caches initial_caches(std::size_t batch) const;
  // Bytes of carried Mamba context for one stream.
  std::size_t cache_bytes() const;

  ParameterList parameters() const;
  // One entry per tensor, named as in parameters().
  static std::vector<LayerCount> parameter_report(const GeneratorConfig& config);
  static std::size_t parameter_count(const GeneratorConfig& config);

  const GeneratorConfig& config() const { return config_; }
  const std::vector<MambaBlock>& blocks() const { return blocks_; }

  struct Conv {
    ad::Tensor weight, bias;
  };
  Conv in_conv, out_conv;
  std::vector<Conv> encoders;  // [2 * c_{l+1}, c_l, stride]
  std::vector<Conv> decoders;  // [c_{l+1}, 2 * c_l, stride]

 private:
  GeneratorConfig config_;
  std::vector<MambaBlock> blocks_;
};

}  // namespace aeromamba::model

#endif  // AEROMAMBA_MODEL_GENERATOR_HPP_
