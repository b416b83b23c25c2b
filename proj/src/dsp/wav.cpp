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
#include "aeromamba/dsp/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "aeromamba/errors.hpp"

namespace aeromamba::dsp {
namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void seek(std::size_t pos) { pos_ = pos; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw FormatError(fmt::format("truncated {}", what), pos_);
    }
  }
  std::string tag() {
    need(4, "chunk tag");
    std::string s(bytes_.begin() + pos_, bytes_.begin() + pos_ + 4);
    pos_ += 4;
    return s;
  }
  std::uint32_t u32() {
    need(4, "field");
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2, "field");
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                                 (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  const std::uint8_t* data() const { return bytes_.data() + pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::string codec_name(std::uint16_t tag) {
  switch (tag) {
    case 0x0002: return "MS ADPCM";
    case 0x0006: return "A-law";
    case 0x0007: return "mu-law";
    case 0x0055: return "MPEG Layer 3";
    default: return "unknown";
  }
}

}  // namespace

SampleFormat sample_format_for_bits(int bits) {
  switch (bits) {
    case 16: return SampleFormat::kPcm16;
    case 24: return SampleFormat::kPcm24;
    case 32: return SampleFormat::kFloat32;
    default:
      throw ArgumentError(
          fmt::format("bit depth must be 16, 24 or 32 (float), got {}", bits));
  }
}

AudioBuffer load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Reader r(bytes);
  if (r.tag() != "RIFF") throw FormatError("missing RIFF signature", 0);
  r.u32();
  if (r.tag() != "WAVE") throw FormatError("missing WAVE form type", 8);

  bool have_fmt = false;
  std::uint16_t codec = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
  while (r.remaining() >= 8) {
    const std::size_t chunk_start = r.offset();
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    const std::size_t body = r.offset();
    if (id == "fmt ") {
      if (size < 16) throw FormatError("fmt chunk shorter than 16 bytes", chunk_start);
      codec = r.u16();
      channels = r.u16();
      rate = r.u32();
      r.u32();  // byte rate
      block_align = r.u16();
      bits = r.u16();
      if (codec == kFormatExtensible) {
        if (size < 40) {
          throw FormatError("extensible fmt chunk shorter than 40 bytes", body);
        }
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        codec = r.u16();  // first two bytes of the subformat GUID
      }
      if (channels == 0) throw FormatError("zero channels", body + 2);
      if (rate == 0) throw FormatError("zero sample rate", body + 4);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk", chunk_start);
      const bool pcm16 = codec == kFormatPcm && bits == 16;
      const bool pcm24 = codec == kFormatPcm && bits == 24;
      const bool f32 = codec == kFormatFloat && bits == 32;
      if (!pcm16 && !pcm24 && !f32) {
        throw UnsupportedFormatError(fmt::format(
            "unsupported WAV codec tag 0x{:04X} ({}) with {} bits per sample",
            codec, codec == kFormatPcm || codec == kFormatFloat
                       ? (codec == kFormatPcm ? "PCM" : "IEEE float")
                       : codec_name(codec),
            bits));
      }
      const std::size_t bytes_per_sample = bits / 8;
      if (block_align != bytes_per_sample * channels) {
        throw FormatError("block align does not match channels x sample size",
                          chunk_start);
      }
      r.need(size, "data chunk");
      const std::size_t frames = size / block_align;
      std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
      const std::uint8_t* p = r.data();
      for (std::size_t i = 0; i < frames; ++i) {
        for (std::size_t c = 0; c < channels; ++c, p += bytes_per_sample) {
          double v;
          if (pcm16) {
            const auto s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            v = s / 32768.0;
          } else if (pcm24) {
            std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
            if (s & 0x800000) s -= 0x1000000;
            v = s / 8388608.0;
          } else {
            std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                              (static_cast<std::uint32_t>(p[3]) << 24);
            v = std::bit_cast<float>(u);
          }
          out[c][i] = v;
        }
      }
      return AudioBuffer(std::move(out), static_cast<int>(rate));
    }
    r.seek(body);
    const std::size_t padded = size + (size & 1);
    if (r.remaining() < padded) {
      throw FormatError(fmt::format("chunk '{}' overruns the file", id),
                        chunk_start);
    }
    r.seek(body + padded);
  }
  throw FormatError(have_fmt ? "no data chunk" : "no fmt chunk", r.offset());
}

void save_wav(const AudioBuffer& buffer, const std::filesystem::path& path,
              SampleFormat format) {
  const std::size_t channels = buffer.num_channels();
  const std::size_t frames = buffer.length();
  const int bits = format == SampleFormat::kPcm16   ? 16
                   : format == SampleFormat::kPcm24 ? 24
                                                    : 32;
  const std::size_t bytes_per_sample = bits / 8;
  const std::uint64_t data_size = frames * channels * bytes_per_sample;
  if (data_size > 0xFFFFFFFFull - 64) {
    throw ArgumentError("audio too long for a RIFF file");
  }
  const bool is_float = format == SampleFormat::kFloat32;
  const std::uint32_t fmt_size = is_float ? 18 : 16;

  std::vector<std::uint8_t> out;
  out.reserve(data_size + 64);
  put_tag(out, "RIFF");
  put_u32(out, static_cast<std::uint32_t>(4 + 8 + fmt_size + 8 + data_size));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, fmt_size);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, static_cast<std::uint16_t>(channels));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate()));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate() * channels *
                                          bytes_per_sample));
  put_u16(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  put_u16(out, static_cast<std::uint16_t>(bits));
  if (is_float) put_u16(out, 0);
  put_tag(out, "data");
  put_u32(out, static_cast<std::uint32_t>(data_size));

  const double scale = std::ldexp(1.0, bits - 1);
  const double upper = 1.0 - std::ldexp(1.0, 1 - bits);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = buffer.channel(c)[i];
      if (is_float) {
        put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
        continue;
      }
      const double clamped = std::clamp(v, -1.0, upper);
      const auto q = static_cast<std::int32_t>(std::round(clamped * scale));
      const auto u = static_cast<std::uint32_t>(q);
      for (std::size_t b = 0; b < bytes_per_sample; ++b) {
        out.push_back((u >> (8 * b)) & 0xFF);
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(fmt::format("cannot write {}", path.string()));
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError(fmt::format("short write to {}", path.string()));
}

}  // namespace aeromamba::dsp
