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
#include "aeromamba/infer/enhance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <complex>
#include <sstream>

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/dsp/fft.hpp"
#include "aeromamba/dsp/stft.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::infer {

dsp::AudioBuffer enhance_offline(const model::Generator& generator, const dsp::AudioBuffer& input) {
  return generator.enhance(input);
}

dsp::AudioBuffer enhance_offline(const model::Checkpoint& checkpoint,
                                 const dsp::AudioBuffer& input) {
  return model::load_generator(checkpoint).enhance(input);
}

namespace {

constexpr std::size_t kCounterBytes =
    3 * sizeof(std::uint64_t) + sizeof(bool);  // next chunk, samples in/out, finished

}  // namespace

StreamSession::StreamSession(const model::Generator& generator, std::size_t chunk_frames)
    : generator_(&generator),
      chunk_frames_(chunk_frames),
      window_(generator.config().stft.window_size),
      hop_(generator.config().stft.hop_length) {
  const auto& cfg = generator.config();
  if (cfg.bidirectional) {
    throw ContractError("streaming needs a causal generator; this one is bidirectional");
  }
  if (window_ != 2 * hop_) {
    throw ContractError(
        fmt::format("streaming needs window = 2 * hop, got {} and {}", window_, hop_));
  }
  if (chunk_frames == 0 || chunk_frames % cfg.frame_multiple() != 0) {
    throw ArgumentError(fmt::format("chunk of {} frames is not a positive multiple of {}",
                                    chunk_frames, cfg.frame_multiple()));
  }
  caches_ = generator.initial_caches(1);
  input_tail_.assign(window_, 0.0);
  overlap_acc_.assign(window_ - hop_, 0.0);
  overlap_env_.assign(window_ - hop_, 0.0);
}

std::vector<double> StreamSession::process(std::uint64_t chunk_index,
                                           std::span<const double> chunk) {
  if (finished_) throw ContractError("stream already finished");
  if (chunk_index != next_chunk_) {
    throw ContractError(
        fmt::format("out-of-order chunk: expected {}, got {}", next_chunk_, chunk_index));
  }
  if (chunk.size() > chunk_samples()) {
    throw ContractError(fmt::format("chunk has {} samples; the session takes {}", chunk.size(),
                                    chunk_samples()));
  }
  return run(chunk, chunk.size() < chunk_samples());
}

std::vector<double> StreamSession::finish() {
  if (finished_) throw ContractError("stream already finished");
  return run({}, true);
}

std::vector<double> StreamSession::run(std::span<const double> chunk, bool last) {
  const auto& cfg = generator_->config();
  const auto w = static_cast<std::ptrdiff_t>(window_), h = static_cast<std::ptrdiff_t>(hop_);
  const auto half = w / 2;
  const auto before = static_cast<std::ptrdiff_t>(samples_in_);
  const auto total = before + static_cast<std::ptrdiff_t>(chunk.size());
  if (last && total < w) {
    throw ArgumentError(
        fmt::format("stream of {} samples is shorter than one STFT frame ({})", total, w));
  }

  // Original samples [before - W, total) with reflection at both stream ends.
  std::vector<double> buf(input_tail_);
  buf.insert(buf.end(), chunk.begin(), chunk.end());
  const std::ptrdiff_t origin = before - w;
  auto sample = [&](std::ptrdiff_t i) {
    if (i < 0) i = -i;
    if (last && i >= total) {
      if (i >= total + half) return 0.0;
      i = 2 * total - 2 - i;
    }
    return buf[i - origin];
  };

  const auto first_frame = static_cast<std::ptrdiff_t>(next_chunk_ * chunk_frames_);
  const std::size_t frames =
      last ? static_cast<std::size_t>((total + w + h - 1) / h - first_frame) : chunk_frames_;
  const std::size_t m = cfg.frame_multiple();
  const std::size_t padded = (frames + m - 1) / m * m;

  const std::size_t bins = cfg.stft.bins();
  const auto window = dsp::hann_periodic(cfg.stft.window_size);
  std::vector<double> spec(2 * bins * padded, 0.0);
  {
    std::vector<double> samples(window_);
    std::vector<std::complex<double>> values(bins);
    for (std::size_t f = 0; f < frames; ++f) {
      const std::ptrdiff_t start = (first_frame + static_cast<std::ptrdiff_t>(f)) * h - half;
      for (std::ptrdiff_t j = 0; j < w; ++j) samples[j] = sample(start + j);
      dsp::analyze_frame(samples, window, values);
      for (std::size_t k = 0; k < bins; ++k) {
        spec[k * padded + f] = values[k].real();
        spec[(bins + k) * padded + f] = values[k].imag();
      }
    }
  }

  std::vector<double> out_spec;
  {
    ad::NoGradGuard guard;
    const ad::Tensor y =
        generator_->forward_frames(ad::Tensor({1, 2 * bins, padded}, std::move(spec)), &caches_);
    out_spec.assign(y.data().begin(), y.data().end());
  }

  // Overlap-add in frame order, continuing the carried partial sums.
  const std::size_t span = (frames - 1) * hop_ + window_;
  std::vector<double> acc(span, 0.0), env(span, 0.0);
  std::copy(overlap_acc_.begin(), overlap_acc_.end(), acc.begin());
  std::copy(overlap_env_.begin(), overlap_env_.end(), env.begin());
  {
    const auto& fft = dsp::RealFft::of_size(window_);
    std::vector<std::complex<double>> values(bins);
    std::vector<double> frame(window_);
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t k = 0; k < bins; ++k) {
        values[k] = {out_spec[k * padded + f], out_spec[(bins + k) * padded + f]};
      }
      fft.inverse(values.data(), frame.data());
      const std::size_t start = f * hop_;
      for (std::size_t j = 0; j < window_; ++j) {
        acc[start + j] += frame[j] / w * window[j];
        env[start + j] += window[j] * window[j];
      }
    }
  }

  // Local position j is original sample first_frame * H + j - W/2.
  const std::ptrdiff_t base = first_frame * h - half;
  const std::ptrdiff_t end = last ? total : base + static_cast<std::ptrdiff_t>(frames) * h;
  std::vector<double> out;
  for (auto n = static_cast<std::ptrdiff_t>(samples_out_); n < end; ++n) {
    const std::size_t j = n - base;
    out.push_back(acc[j] / env[j]);
  }

  if (!last) {
    const std::size_t done = frames * hop_;
    std::copy(acc.begin() + done, acc.end(), overlap_acc_.begin());
    std::copy(env.begin() + done, env.end(), overlap_env_.begin());
    std::copy(buf.end() - w, buf.end(), input_tail_.begin());
  } else {
    std::fill(overlap_acc_.begin(), overlap_acc_.end(), 0.0);
    std::fill(overlap_env_.begin(), overlap_env_.end(), 0.0);
    std::fill(input_tail_.begin(), input_tail_.end(), 0.0);
    finished_ = true;
  }
  samples_in_ = total;
  samples_out_ += out.size();
  ++next_chunk_;
  return out;
}

std::size_t StreamSession::state_bytes() const {
  std::size_t n = 0;
  for (const auto& b : caches_.blocks) {
    n += b.conv.rows.size();
    for (const auto& s : b.ssm.h) n += s.size();
  }
  n += input_tail_.size() + overlap_acc_.size() + overlap_env_.size();
  return sizeof(double) * n + kCounterBytes;
}

std::size_t StreamSession::persistent_bytes(const model::GeneratorConfig& config) {
  config.validate();
  std::size_t n = 0;
  for (int l = 0; l < config.depth; ++l) {
    const auto b = config.block_config(l);
    n += b.d_inner() * (b.conv_kernel - 1 + b.d_state);
  }
  const std::size_t w = config.stft.window_size, h = config.stft.hop_length;
  n += w + 2 * (w - h);
  return sizeof(double) * n + kCounterBytes;
}

namespace {

model::StoredTensor stored(std::string name, std::vector<std::uint64_t> dims,
                           std::span<const double> values) {
  return {std::move(name), std::move(dims), std::vector<float>(values.begin(), values.end())};
}

void load_into(const model::Checkpoint& state, const std::string& name,
               std::span<double> target) {
  const auto* t = state.find(name);
  if (t == nullptr) throw ContractError(fmt::format("stream state is missing {}", name));
  if (t->values.size() != target.size()) {
    throw ContractError(fmt::format("stream state {} has {} values, expected {}", name,
                                    t->values.size(), target.size()));
  }
  std::copy(t->values.begin(), t->values.end(), target.begin());
}

}  // namespace

model::Checkpoint StreamSession::snapshot() const {
  model::Checkpoint c;
  const auto& cfg = generator_->config();
  for (int l = 0; l < cfg.depth; ++l) {
    const auto b = cfg.block_config(l);
    const auto di = static_cast<std::uint64_t>(b.d_inner());
    const std::string p = fmt::format("encoder.{}.mamba.", l);
    const auto& cache = caches_.blocks[l];
    c.tensors.push_back(stored(p + "conv_history",
                               {static_cast<std::uint64_t>(b.conv_kernel - 1), di},
                               cache.conv.rows));
    c.tensors.push_back(stored(p + "ssm_state", {di, static_cast<std::uint64_t>(b.d_state)},
                               cache.ssm.h.at(0)));
  }
  c.tensors.push_back(stored("stream.input_tail", {input_tail_.size()}, input_tail_));
  c.tensors.push_back(stored("stream.overlap_acc", {overlap_acc_.size()}, overlap_acc_));
  c.tensors.push_back(stored("stream.overlap_env", {overlap_env_.size()}, overlap_env_));
  c.config_text = fmt::format(
      "[stream]\nchunk_frames = {}\nnext_chunk = {}\nsamples_in = {}\nsamples_out = {}\n"
      "finished = {}\n\n{}",
      chunk_frames_, next_chunk_, samples_in_, samples_out_, finished_ ? 1 : 0, cfg.to_text());
  return c;
}

StreamSession StreamSession::restore(const model::Generator& generator,
                                     const model::Checkpoint& state) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(state.config_text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw FormatError(fmt::format("stream state text: {}", e.message()), 0);
  }
  if (model::GeneratorConfig::from_text(state.config_text) != generator.config()) {
    throw ContractError("stream state was saved for a different generator config");
  }
  std::size_t chunk_frames = 0;
  std::uint64_t next_chunk = 0, samples_in = 0, samples_out = 0;
  int finished = 0;
  try {
    chunk_frames = tree.get<std::size_t>("stream.chunk_frames");
    next_chunk = tree.get<std::uint64_t>("stream.next_chunk");
    samples_in = tree.get<std::uint64_t>("stream.samples_in");
    samples_out = tree.get<std::uint64_t>("stream.samples_out");
    finished = tree.get<int>("stream.finished");
  } catch (const pt::ptree_error& e) {
    throw FormatError(fmt::format("stream state text: {}", e.what()), 0);
  }
  StreamSession s(generator, chunk_frames);
  s.next_chunk_ = next_chunk;
  s.samples_in_ = samples_in;
  s.samples_out_ = samples_out;
  s.finished_ = finished != 0;
  for (int l = 0; l < generator.config().depth; ++l) {
    const std::string p = fmt::format("encoder.{}.mamba.", l);
    auto& cache = s.caches_.blocks[l];
    load_into(state, p + "conv_history", cache.conv.rows);
    load_into(state, p + "ssm_state", cache.ssm.h.at(0));
  }
  load_into(state, "stream.input_tail", s.input_tail_);
  load_into(state, "stream.overlap_acc", s.overlap_acc_);
  load_into(state, "stream.overlap_env", s.overlap_env_);
  if (state.tensors.size() != 2 * static_cast<std::size_t>(generator.config().depth) + 3) {
    throw ContractError(
        fmt::format("stream state has {} tensors, expected {}", state.tensors.size(),
                    2 * generator.config().depth + 3));
  }
  return s;
}

dsp::AudioBuffer enhance_streaming(const model::Generator& generator,
                                   const dsp::AudioBuffer& input, std::size_t chunk_frames) {
  std::vector<std::vector<double>> channels;
  for (std::size_t c = 0; c < input.num_channels(); ++c) {
    StreamSession session(generator, chunk_frames);
    const auto x = input.channel(c);
    const std::size_t n = session.chunk_samples();
    std::vector<double> y;
    y.reserve(x.size());
    std::uint64_t index = 0;
    for (std::size_t pos = 0; !session.finished(); pos += n, ++index) {
      const auto part = session.process(index, x.subspan(pos, std::min(n, x.size() - pos)));
      y.insert(y.end(), part.begin(), part.end());
      if (!session.finished() && pos + n == x.size()) {
        const auto tail = session.finish();
        y.insert(y.end(), tail.begin(), tail.end());
      }
    }
    channels.push_back(std::move(y));
  }
  return dsp::AudioBuffer(std::move(channels), input.sample_rate());
}

}  // namespace aeromamba::infer
