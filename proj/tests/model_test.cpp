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
#include <cmath>
#include <random>
#include <vector>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/errors.hpp"
#include "aeromamba/model/checkpoint.hpp"
#include "aeromamba/model/discriminator.hpp"
#include "aeromamba/model/generator.hpp"
#include "aeromamba/model/mamba_block.hpp"
#include "gtest/gtest.h"
#include "test_util.hpp"

namespace aeromamba::model {
namespace {

using ad::Tensor;

std::vector<double> values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

Tensor random_tensor(ad::Shape shape, std::uint64_t seed, double sigma = 1.0) {
  const std::size_t n = ad::numel(shape);
  return Tensor(std::move(shape), testing::gaussian(n, seed, sigma));
}

void randomize(Tensor t, std::uint64_t seed, double sigma) {
  const auto v = testing::gaussian(t.size(), seed, sigma);
  std::copy(v.begin(), v.end(), t.mutable_data().begin());
}

MambaBlock small_block(int d_model = 8, bool bidirectional = false) {
  std::mt19937_64 rng(3);
  MambaBlockConfig c;
  c.d_model = d_model;
  c.bidirectional = bidirectional;
  return MambaBlock(c, rng);
}

GeneratorConfig small_generator_config() {
  GeneratorConfig c;
  c.depth = 2;
  c.base_channels = 8;
  c.max_channels = 16;
  c.d_state = 4;
  return c;
}

// Independent closed form: per level, an encoder conv (2 c_out x c_in x 4
// plus bias), a Mamba block of width c_out and a decoder conv (c_out x 2 c_in
// x 4 plus bias), plus the two 1x1 projections against 514 spectral channels.
std::size_t closed_form_count(int base, int cap, int depth) {
  auto ch = [&](int l) { return std::min(base << l, cap); };
  auto mamba = [](std::size_t d) {
    const std::size_t di = 2 * d, n = 16, r = std::max<std::size_t>(1, di / 16);
    return d + 2 * di * d + di * 4 + di + di * n + di + 2 * n * di + 2 * r * di + di + d * di;
  };
  std::size_t total = 2 * 514 * static_cast<std::size_t>(ch(0)) + ch(0) + 514;
  for (int l = 0; l < depth; ++l) {
    const std::size_t ci = ch(l), co = ch(l + 1);
    total += 2 * co * ci * 4 + 2 * co + mamba(co) + co * 2 * ci * 4 + 2 * ci;
  }
  return total;
}

TEST(MambaBlock, ZeroOutputProjectionIsIdentity) {
  MambaBlock b = small_block();
  std::fill(b.out_proj.mutable_data().begin(), b.out_proj.mutable_data().end(), 0.0);
  const Tensor x = random_tensor({2, 13, 8}, 1);
  EXPECT_EQ(values(b.forward(x)), values(x));
}

TEST(MambaBlock, ShapeContract) {
  const MambaBlock b = small_block();
  for (std::size_t len : {1u, 7u, 256u}) {
    const Tensor y = b.forward(random_tensor({1, len, 8}, len));
    EXPECT_EQ(y.shape(), (ad::Shape{1, len, 8}));
  }
  EXPECT_THROW(b.forward(random_tensor({1, 4, 7}, 1)), ArgumentError);
}

TEST(MambaBlock, StepFoldMatchesBatchBitExactly) {
  const MambaBlock b = small_block();
  const std::size_t len = 300;
  const Tensor x = random_tensor({1, len, 8}, 5);
  const auto batch = values(b.forward(x));
  MambaBlock::Cache cache = b.initial_cache(1);
  for (std::size_t t = 0; t < len; ++t) {
    const auto y = b.step(x.data().subspan(t * 8, 8), cache);
    for (int i = 0; i < 8; ++i) ASSERT_EQ(y[i], batch[t * 8 + i]) << t;
  }
}

TEST(MambaBlock, CachedChunksMatchWholeSequence) {
  const MambaBlock b = small_block();
  const Tensor x = random_tensor({2, 40, 8}, 6);
  const auto whole = values(b.forward(x));
  MambaBlock::Cache cache;
  const auto a = values(b.forward(ad::slice(x, 1, 0, 25), &cache));
  const auto c = values(b.forward(ad::slice(x, 1, 25, 15), &cache));
  for (std::size_t n = 0; n < 2; ++n) {
    for (std::size_t t = 0; t < 40; ++t) {
      for (std::size_t i = 0; i < 8; ++i) {
        const double got = t < 25 ? a[(n * 25 + t) * 8 + i] : c[(n * 15 + t - 25) * 8 + i];
        ASSERT_EQ(got, whole[(n * 40 + t) * 8 + i]);
      }
    }
  }
}

TEST(MambaBlock, CacheSizeIsFixed) {
  const MambaBlock b = small_block();
  MambaBlock::Cache cache = b.initial_cache(1);
  const std::size_t expected = b.cache_bytes();
  for (int t = 0; t < 1000; ++t) b.step(std::vector<double>(8, 0.5), cache);
  EXPECT_EQ(sizeof(double) * (cache.conv.rows.size() + cache.ssm.h[0].size()), expected);
}

TEST(MambaBlock, BidirectionalCannotStream) {
  const MambaBlock b = small_block(8, true);
  const Tensor x = random_tensor({1, 6, 8}, 2);
  EXPECT_EQ(b.forward(x).shape(), x.shape());
  MambaBlock::Cache cache;
  EXPECT_THROW(b.forward(x, &cache), ContractError);
}

TEST(ParameterCount, DefaultToyConfig) {
  const GeneratorConfig c;
  EXPECT_EQ(Generator::parameter_count(c), closed_form_count(32, 256, 4));
  EXPECT_EQ(Generator::parameter_count(c), 2835746u);
  const Generator g(c);
  EXPECT_EQ(scalar_count(g.parameters()), Generator::parameter_count(c));
  const auto report = Generator::parameter_report(c);
  const auto params = g.parameters();
  ASSERT_EQ(report.size(), params.size());
  for (std::size_t i = 0; i < report.size(); ++i) {
    EXPECT_EQ(report[i].name, params[i].name);
    EXPECT_EQ(report[i].count, params[i].tensor.size());
  }
}

TEST(ParameterCount, DoublingChannelsGrowsBetweenTwoAndFour) {
  GeneratorConfig a;
  a.depth = 2;
  a.base_channels = 8;
  a.max_channels = 1 << 20;
  GeneratorConfig b = a;
  b.base_channels = 16;
  const double ratio = static_cast<double>(Generator::parameter_count(b)) /
                       static_cast<double>(Generator::parameter_count(a));
  EXPECT_GT(ratio, 2.0);
  EXPECT_LT(ratio, 4.0);
  EXPECT_EQ(Generator::parameter_count(a), closed_form_count(8, 1 << 20, 2));
}

TEST(GeneratorConfig, TextRoundTrip) {
  GeneratorConfig c = small_generator_config();
  c.bidirectional = true;
  EXPECT_EQ(GeneratorConfig::from_text(c.to_text()), c);
  EXPECT_THROW(GeneratorConfig::from_text("[generator]\nwidth = 3\n"), ArgumentError);
  EXPECT_THROW(GeneratorConfig::from_text("[generator]\ndepth = 0\n"), ArgumentError);
  EXPECT_EQ(GeneratorConfig().channels(4), 256);
  EXPECT_EQ(GeneratorConfig().frame_multiple(), 256u);
}

TEST(Generator, OutputLengthMatchesInput) {
  const Generator g(GeneratorConfig{}, 1);
  ad::NoGradGuard guard;
  for (std::size_t len : {8192u, 44100u, 441000u}) {
    const Tensor y = g.forward(random_tensor({1, len}, len, 0.1));
    EXPECT_EQ(y.shape(), (ad::Shape{1, len}));
  }
  EXPECT_THROW(g.forward(random_tensor({1, 511}, 1)), ArgumentError);
}

TEST(Generator, UntrainedOutputIsInputReconstruction) {
  const Generator g(small_generator_config(), 2);
  const auto x = testing::gaussian(3000, 3, 0.2);
  const auto y = g.enhance(dsp::AudioBuffer::mono(x, dsp::kHighRate));
  EXPECT_LE(testing::max_abs_diff(y.channel(0), x), 1e-9);
}

TEST(Generator, RandomWeightsGiveFiniteDeterministicOutput) {
  Generator g(GeneratorConfig{}, 4);
  randomize(g.out_conv.weight, 5, 0.05);
  ad::NoGradGuard guard;
  const Tensor x = random_tensor({2, 9000}, 6, 0.3);
  const auto y1 = values(g.forward(x));
  for (double v : y1) ASSERT_TRUE(std::isfinite(v));
  EXPECT_EQ(values(g.forward(x)), y1);
}

TEST(Generator, ZeroOutputProjectionsLeaveEncoderConvOnly) {
  Generator g(small_generator_config(), 7);
  for (const auto& b : g.blocks()) {
    Tensor w = b.out_proj;
    std::fill(w.mutable_data().begin(), w.mutable_data().end(), 0.0);
  }
  const Tensor spec = random_tensor({1, 514, 32}, 8);
  const auto acts = g.encode(spec);
  Tensor h = ad::conv1d(spec, g.in_conv.weight, g.in_conv.bias);
  EXPECT_EQ(values(acts[0]), values(h));
  for (std::size_t l = 0; l < g.encoders.size(); ++l) {
    h = ad::glu(ad::conv1d(h, g.encoders[l].weight, g.encoders[l].bias, 4), 1);
    EXPECT_EQ(values(acts[l + 1]), values(h)) << l;
  }
}

TEST(Generator, EveryParameterReceivesGradient) {
  Generator g(small_generator_config(), 9);
  randomize(g.out_conv.weight, 10, 0.05);
  const Tensor x = random_tensor({2, 4000}, 11, 0.3);
  ad::backward(ad::mean(ad::mul(g.forward(x), x)));
  for (const auto& p : g.parameters()) {
    ASSERT_TRUE(p.tensor.has_grad()) << p.name;
    double norm = 0.0;
    for (double v : p.tensor.grad()) norm += v * v;
    EXPECT_GT(norm, 0.0) << p.name;
  }
}

TEST(Generator, CachedFramesMatchWholeSpectrogram) {
  const Generator g(small_generator_config(), 12);
  ad::NoGradGuard guard;
  const Tensor spec = random_tensor({1, 514, 64}, 13);
  const auto whole = values(g.forward_frames(spec));
  auto caches = g.initial_caches(1);
  const auto a = values(g.forward_frames(ad::slice(spec, 2, 0, 32), &caches));
  const auto b = values(g.forward_frames(ad::slice(spec, 2, 32, 32), &caches));
  double worst = 0.0;
  for (std::size_t c = 0; c < 514; ++c) {
    for (std::size_t f = 0; f < 64; ++f) {
      const double got = f < 32 ? a[c * 32 + f] : b[c * 32 + f - 32];
      worst = std::max(worst, std::abs(got - whole[c * 64 + f]));
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(Discriminator, EighteenFeatureMaps) {
  const MultiScaleDiscriminator d;
  const auto out = d.forward(random_tensor({2, 4096}, 1));
  ASSERT_EQ(out.logits.size(), 3u);
  std::size_t maps = 0;
  for (const auto& f : out.features) maps += f.size();
  EXPECT_EQ(maps, 18u);
  for (const auto& l : out.logits) {
    for (double v : l.data()) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_THROW(d.forward(random_tensor({1, 1000}, 1)), ArgumentError);
}

TEST(Discriminator, ScaleTwoInputIsAveragePool) {
  const auto x = testing::gaussian(10, 2);
  const Tensor pooled = MultiScaleDiscriminator::downsample(Tensor({1, 1, 10}, x));
  ASSERT_EQ(pooled.size(), 5u);
  for (std::size_t t = 0; t < 5; ++t) {
    const long lo = std::max<long>(0, 2 * static_cast<long>(t) - 1);
    const long hi = std::min<long>(10, 2 * static_cast<long>(t) + 3);
    double acc = 0.0;
    for (long i = lo; i < hi; ++i) acc += x[i];
    EXPECT_EQ(pooled.data()[t], acc / static_cast<double>(hi - lo));
  }
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  const Generator g(small_generator_config(), 14);
  const auto dir = testing::scratch_dir("ckpt");
  const Checkpoint c = snapshot(g.parameters(), g.config().to_text());
  save_checkpoint(c, dir / "a.amba");
  save_checkpoint(load_checkpoint(dir / "a.amba"), dir / "b.amba");
  EXPECT_EQ(testing::read_bytes(dir / "a.amba"), testing::read_bytes(dir / "b.amba"));
}

TEST(Checkpoint, LayoutAndErrors) {
  Checkpoint c;
  c.tensors.push_back({"w", {2}, {1.0f, -2.0f}});
  c.config_text = "x";
  const auto bytes = encode_checkpoint(c);
  const std::vector<std::uint8_t> expected{
      'A', 'M', 'B', 'A', 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 'w', 1, 2, 0, 0, 0, 0, 0, 0, 0,
      0, 0, 0x80, 0x3F, 0, 0, 0, 0xC0, 1, 0, 0, 0, 'x'};
  EXPECT_EQ(bytes, expected);

  auto bad = bytes;
  bad[0] = 'X';
  try {
    decode_checkpoint(bad);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 0u);
  }
  bad = bytes;
  bad[4] = 2;
  EXPECT_THROW(decode_checkpoint(bad), UnsupportedFormatError);
  EXPECT_THROW(decode_checkpoint(std::span(bytes).first(20)), FormatError);
  EXPECT_THROW(load_checkpoint("/nonexistent/x.amba"), IoError);
}

TEST(Checkpoint, MismatchListsTensors) {
  const Generator g(small_generator_config(), 15);
  Checkpoint c = snapshot(g.parameters(), g.config().to_text());
  c.tensors.erase(c.tensors.begin());
  c.tensors.back().dims = {1};
  c.tensors.back().values = {0.0f};
  try {
    restore(c, g.parameters());
    FAIL();
  } catch (const ContractError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("missing in_conv.weight"), std::string::npos);
    EXPECT_NE(msg.find("out_conv.bias"), std::string::npos);
  }
}

TEST(Checkpoint, ReloadedGeneratorMatchesRoundedWeights) {
  Generator g(small_generator_config(), 16);
  randomize(g.out_conv.weight, 17, 0.05);
  round_to_float(g.parameters());
  const Generator h = load_generator(snapshot(g.parameters(), g.config().to_text()));
  const auto x = dsp::AudioBuffer::mono(testing::gaussian(2048, 18, 0.2), dsp::kHighRate);
  EXPECT_EQ(g.enhance(x), h.enhance(x));
}

}  // namespace
}  // namespace aeromamba::model
