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
#ifndef AEROMAMBA_MODEL_CHECKPOINT_HPP_
#define AEROMAMBA_MODEL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "aeromamba/model/generator.hpp"
#include "aeromamba/model/parameters.hpp"

namespace aeromamba::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct StoredTensor {
  std::string name;
  std::vector<std::uint64_t> dims;
  std::vector<float> values;

  // zlib CRC-32 of the little-endian float bytes.
  std::uint32_t checksum() const;
};

// Little-endian layout: "AMBA", u32 version, u32 tensor count, then per
// tensor u16 name length, name bytes, u8 rank, rank x u64 dims, f32 values;
// finally u32 config length and the config text.
struct Checkpoint {
  std::vector<StoredTensor> tensors;
  std::string config_text;

  const StoredTensor* find(const std::string& name) const;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint);
// Throws FormatError (with offset) on malformed bytes and
// UnsupportedFormatError on another version.
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Single-precision snapshot of the parameters.
Checkpoint snapshot(const ParameterList& params, std::string config_text);
// Copies stored values into params. Throws ContractError naming every
// missing, unexpected or reshaped tensor.
void restore(const Checkpoint& checkpoint, const ParameterList& params);

// Rounds every parameter to single precision, as a checkpoint would.
void round_to_float(const ParameterList& params);

// Builds the generator described by the [generator] section of the config
// text and loads its weights.
Generator load_generator(const Checkpoint& checkpoint);

}  // namespace aeromamba::model

#endif  // AEROMAMBA_MODEL_CHECKPOINT_HPP_
