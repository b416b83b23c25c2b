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
#ifndef AEROMAMBA_INFER_ENHANCE_HPP_
#define AEROMAMBA_INFER_ENHANCE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aeromamba/dsp/audio.hpp"
#include "aeromamba/model/checkpoint.hpp"
#include "aeromamba/model/generator.hpp"

namespace aeromamba::infer {

// Whole-signal enhancement; every channel independently.
dsp::AudioBuffer enhance_offline(const model::Generator& generator, const dsp::AudioBuffer& input);
// Builds the generator from the checkpoint first; a checkpoint whose tensors
// do not fit its config raises ContractError.
dsp::AudioBuffer enhance_offline(const model::Checkpoint& checkpoint, const dsp::AudioBuffer& input);

// Chunked enhancement of one mono stream with fixed-size carried state.
//
// Chunk c holds chunk_frames * hop samples and yields the output samples
// [c * chunk_samples - W/2, (c + 1) * chunk_samples - W/2): output lags input
// by half an analysis window. A chunk shorter than chunk_samples() ends the
// stream, as does finish(); both return every remaining output sample.
// Requires a causal (unidirectional) generator and window = 2 * hop.
class StreamSession {
 public:
  // The generator must outlive the session.
  StreamSession(const model::Generator& generator, std::size_t chunk_frames);

  std::vector<double> process(std::uint64_t chunk_index, std::span<const double> chunk);
  std::vector<double> finish();

  std::size_t chunk_frames() const { return chunk_frames_; }
  std::size_t chunk_samples() const { return chunk_frames_ * hop_; }
  std::uint64_t next_chunk() const { return next_chunk_; }
  bool finished() const { return finished_; }
  std::uint64_t samples_in() const { return samples_in_; }
  std::uint64_t samples_out() const { return samples_out_; }

  // Bytes held between calls, counted from the live buffers.
  std::size_t state_bytes() const;
  // The same quantity from the generator config alone.
  static std::size_t persistent_bytes(const model::GeneratorConfig& config);

  // State as a checkpoint-format tensor table; counters go in the text.
  model::Checkpoint snapshot() const;
  static StreamSession restore(const model::Generator& generator, const model::Checkpoint& state);

 private:
  std::vector<double> run(std::span<const double> chunk, bool last);

  const model::Generator* generator_;
  std::size_t chunk_frames_;
  std::size_t window_, hop_;
  model::Generator::Caches caches_;
  std::vector<double> input_tail_;   // last W input samples, oldest first
  std::vector<double> overlap_acc_;  // W - H pending overlap-add sums
  std::vector<double> overlap_env_;  // matching squared-window sums
  std::uint64_t next_chunk_ = 0;
  std::uint64_t samples_in_ = 0;
  std::uint64_t samples_out_ = 0;
  bool finished_ = false;
};

// Streams every channel through its own session.
dsp::AudioBuffer enhance_streaming(const model::Generator& generator,
                                   const dsp::AudioBuffer& input, std::size_t chunk_frames);

}  // namespace aeromamba::infer

#endif  // AEROMAMBA_INFER_ENHANCE_HPP_
