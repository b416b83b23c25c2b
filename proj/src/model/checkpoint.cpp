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
#include "aeromamba/model/checkpoint.hpp"

#include <fmt/format.h>
#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include "aeromamba/errors.hpp"

namespace aeromamba::model {

namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::uint32_t, T>>;
    U u;
    if constexpr (std::is_floating_point_v<T>) {
      u = std::bit_cast<std::uint32_t>(v);
    } else {
      u = static_cast<U>(v);
    }
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void put_bytes(const std::string& s) { bytes.insert(bytes.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}

  template <typename U>
  U get(const char* what) {
    need(sizeof(U), what);
    U u = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) u |= static_cast<U>(bytes_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return u;
  }
  std::string get_string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(fmt::format("checkpoint truncated while reading {}", what), pos_);
    }
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::string dims_string(const std::vector<std::uint64_t>& dims) {
  std::string s = "[";
  for (std::size_t i = 0; i < dims.size(); ++i) s += fmt::format("{}{}", i ? ", " : "", dims[i]);
  return s + "]";
}

}  // namespace

std::uint32_t StoredTensor::checksum() const {
  Writer w;
  for (float v : values) w.put(v);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, w.bytes.data(), static_cast<uInt>(w.bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

const StoredTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& checkpoint) {
  Writer w;
  w.put_bytes("AMBA");
  w.put<std::uint32_t>(kCheckpointVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(checkpoint.tensors.size()));
  for (const auto& t : checkpoint.tensors) {
    if (t.name.size() > 0xFFFF || t.dims.size() > 0xFF) {
      throw ArgumentError(fmt::format("tensor '{}' cannot be encoded", t.name));
    }
    std::uint64_t n = 1;
    for (auto d : t.dims) n *= d;
    if (n != t.values.size()) {
      throw ArgumentError(fmt::format("tensor '{}' has {} values for dims {}", t.name,
                                      t.values.size(), dims_string(t.dims)));
    }
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.put_bytes(t.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims) w.put<std::uint64_t>(d);
    for (float v : t.values) w.put(v);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(checkpoint.config_text.size()));
  w.put_bytes(checkpoint.config_text);
  return std::move(w.bytes);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.get_string(4, "magic") != "AMBA") throw FormatError("not a checkpoint (bad magic)", 0);
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw UnsupportedFormatError(fmt::format("unsupported checkpoint version {}", version));
  }
  const auto count = r.get<std::uint32_t>("tensor count");
  Checkpoint c;
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor t;
    const auto name_len = r.get<std::uint16_t>("name length");
    t.name = r.get_string(name_len, "name");
    const auto rank = r.get<std::uint8_t>("rank");
    std::uint64_t n = 1;
    for (int k = 0; k < rank; ++k) {
      const std::size_t at = r.pos();
      t.dims.push_back(r.get<std::uint64_t>("dims"));
      if (t.dims.back() != 0 && n > (bytes.size() / 4) / t.dims.back()) {
        throw FormatError(fmt::format("tensor '{}' dims exceed file size", t.name), at);
      }
      n *= t.dims.back();
    }
    t.values.resize(n);
    for (auto& v : t.values) v = std::bit_cast<float>(r.get<std::uint32_t>("values"));
    c.tensors.push_back(std::move(t));
  }
  const auto cfg_len = r.get<std::uint32_t>("config length");
  c.config_text = r.get_string(cfg_len, "config text");
  if (!r.done()) throw FormatError("trailing bytes after checkpoint", r.pos());
  return c;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto bytes = encode_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write checkpoint '{}'", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("failed writing checkpoint '{}'", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read checkpoint '{}'", path.string()));
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return decode_checkpoint(bytes);
}

Checkpoint snapshot(const ParameterList& params, std::string config_text) {
  Checkpoint c;
  c.config_text = std::move(config_text);
  for (const auto& p : params) {
    StoredTensor t;
    t.name = p.name;
    for (auto d : p.tensor.shape()) t.dims.push_back(d);
    t.values.reserve(p.tensor.size());
    for (double v : p.tensor.data()) t.values.push_back(static_cast<float>(v));
    c.tensors.push_back(std::move(t));
  }
  return c;
}

void restore(const Checkpoint& checkpoint, const ParameterList& params) {
  std::map<std::string, const StoredTensor*> stored;
  for (const auto& t : checkpoint.tensors) stored[t.name] = &t;
  std::vector<std::string> problems;
  for (const auto& p : params) {
    const auto it = stored.find(p.name);
    if (it == stored.end()) {
      problems.push_back(fmt::format("missing {}", p.name));
      continue;
    }
    std::vector<std::uint64_t> dims(p.tensor.shape().begin(), p.tensor.shape().end());
    if (it->second->dims != dims) {
      problems.push_back(fmt::format("{} stored {} expected {}", p.name,
                                     dims_string(it->second->dims), dims_string(dims)));
    }
    stored.erase(it);
  }
  for (const auto& [name, t] : stored) problems.push_back(fmt::format("unexpected {}", name));
  if (!problems.empty()) {
    std::string msg = "checkpoint does not match the model:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ContractError(msg);
  }
  for (const auto& p : params) {
    const StoredTensor* t = checkpoint.find(p.name);
    ad::Tensor dst = p.tensor;
    auto data = dst.mutable_data();
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = t->values[k];
  }
}

void round_to_float(const ParameterList& params) {
  for (const auto& p : params) {
    ad::Tensor t = p.tensor;
    for (double& v : t.mutable_data()) v = static_cast<float>(v);
  }
}

Generator load_generator(const Checkpoint& checkpoint) {
  Generator g(GeneratorConfig::from_text(checkpoint.config_text));
  restore(checkpoint, g.parameters());
  return g;
}

}  // namespace aeromamba::model
