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
#include <complex>
#include <memory>
#include <utility>

#include "aeromamba/autodiff/ops.hpp"
#include "aeromamba/dsp/fft.hpp"
#include "aeromamba/ssm.hpp"
#include "ops_internal.hpp"

namespace aeromamba::ad {

using internal::check;
using internal::sink;

namespace {

ssm::SsmParams<double> to_params(const SsmTensors& t, std::size_t d_inner) {
  const std::vector<Tensor> all = t.all();
  for (const Tensor& p : all) check(p.defined(), "selective_scan", "undefined parameter");
  internal::check_rank(t.a_log, 2, "selective_scan");
  internal::check_rank(t.w_delta_down, 2, "selective_scan");
  ssm::SsmParams<double> p;
  p.d_inner = static_cast<int>(d_inner);
  p.d_state = static_cast<int>(t.a_log.dim(1));
  p.d_rank = static_cast<int>(t.w_delta_down.dim(0));
  auto copy = [](const Tensor& src) {
    return std::vector<double>(src.data().begin(), src.data().end());
  };
  p.a_log = copy(t.a_log);
  p.d_skip = copy(t.d_skip);
  p.w_b = copy(t.w_b);
  p.w_c = copy(t.w_c);
  p.w_delta_down = copy(t.w_delta_down);
  p.w_delta_up = copy(t.w_delta_up);
  p.b_delta = copy(t.b_delta);
  try {
    p.validate();
  } catch (const ArgumentError&) {
    throw ArgumentError(fmt::format(
        "selective_scan: parameter shapes a_log {} w_b {} w_delta_down {} do not match "
        "d_inner {}",
        shape_string(t.a_log.shape()), shape_string(t.w_b.shape()),
        shape_string(t.w_delta_down.shape()), d_inner));
  }
  return p;
}

void accumulate(double* dst, const std::vector<double>& src) {
  if (dst == nullptr) return;
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
}

}  // namespace

Tensor selective_scan(const Tensor& x, const SsmTensors& params, const ScanStates* initial,
                      ScanStates* final_states) {
  internal::check_rank(x, 3, "selective_scan");
  const std::size_t batch = x.dim(0), len = x.dim(1), d = x.dim(2);
  const auto p = std::make_shared<const ssm::SsmParams<double>>(to_params(params, d));
  const std::size_t ns = p->state_size();
  if (initial != nullptr) {
    check(initial->h.size() == batch, "selective_scan",
          fmt::format("{} initial states for batch {}", initial->h.size(), batch));
  }
  bool record = grad_enabled() && x.requires_grad();
  for (const Tensor& t : params.all()) record = record || (grad_enabled() && t.requires_grad());

  auto h0 = std::make_shared<std::vector<ssm::SsmState<double>>>();
  auto saved = std::make_shared<std::vector<ssm::ScanSaved<double>>>(record ? batch : 0);
  std::vector<double> out(x.size());
  if (final_states != nullptr) final_states->h.assign(batch, {});
  const auto xv = x.data();
  for (std::size_t n = 0; n < batch; ++n) {
    auto state = ssm::SsmState<double>::for_params(*p);
    if (initial != nullptr) {
      check(initial->h[n].size() == ns, "selective_scan",
            fmt::format("initial state holds {} values, expected {}", initial->h[n].size(), ns));
      state.h = initial->h[n];
    }
    const auto r = ssm::scan_sequential<double>(*p, xv.subspan(n * len * d, len * d), state,
                                                record ? &(*saved)[n] : nullptr);
    std::copy(r.y.begin(), r.y.end(), &out[n * len * d]);
    if (final_states != nullptr) final_states->h[n] = r.h_final.h;
    h0->push_back(std::move(state));
  }
  std::vector<Tensor> parents{x};
  for (const Tensor& t : params.all()) parents.push_back(t);
  return make_result(
      "selective_scan", x.shape(), std::move(out), parents,
      [x, p, h0, saved, batch, len, d](Node& self) {
        const auto xv = x.data();
        const std::span<const double> gy(self.grad);
        double* gx = sink(self, 0);
        for (std::size_t n = 0; n < batch; ++n) {
          const auto g = ssm::scan_backward<double>(*p, xv.subspan(n * len * d, len * d),
                                                    (*h0)[n], gy.subspan(n * len * d, len * d),
                                                    (*saved)[n]);
          accumulate(gx ? gx + n * len * d : nullptr, g.x);
          accumulate(sink(self, 1), g.params.a_log);
          accumulate(sink(self, 2), g.params.d_skip);
          accumulate(sink(self, 3), g.params.w_b);
          accumulate(sink(self, 4), g.params.w_c);
          accumulate(sink(self, 5), g.params.w_delta_down);
          accumulate(sink(self, 6), g.params.w_delta_up);
          accumulate(sink(self, 7), g.params.b_delta);
        }
      });
}

Tensor stft(const Tensor& x, const dsp::StftConfig& config) {
  internal::check_rank(x, 2, "stft");
  config.validate();
  const std::size_t batch = x.dim(0), length = x.dim(1);
  check(length >= 1, "stft", "empty signal");
  const std::size_t bins = config.bins();
  const std::size_t frames = dsp::stft_frame_count(length, config);
  std::vector<double> out(batch * 2 * bins * frames);
  for (std::size_t n = 0; n < batch; ++n) {
    const auto spec = dsp::stft(x.data().subspan(n * length, length), config);
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t k = 0; k < bins; ++k) {
        out[(n * 2 * bins + k) * frames + f] = spec.at(f, k).real();
        out[(n * 2 * bins + bins + k) * frames + f] = spec.at(f, k).imag();
      }
    }
  }
  return make_result(
      "stft", {batch, 2 * bins, frames}, std::move(out), {x},
      [config, batch, length, bins, frames](Node& self) {
        double* gx = sink(self, 0);
        const int w = config.window_size;
        const auto window = dsp::hann_periodic(w);
        const auto& fft = dsp::RealFft::of_size(w);
        std::vector<std::complex<double>> y(bins);
        std::vector<double> frame(w);
        for (std::size_t n = 0; n < batch; ++n) {
          for (std::size_t f = 0; f < frames; ++f) {
            for (std::size_t k = 0; k < bins; ++k) {
              const std::complex<double> g(self.grad[(n * 2 * bins + k) * frames + f],
                                           self.grad[(n * 2 * bins + bins + k) * frames + f]);
              y[k] = (k == 0 || k == bins - 1) ? g : 0.5 * g;
            }
            fft.inverse(y.data(), frame.data());
            for (int m = 0; m < w; ++m) {
              const auto src = dsp::padded_source(
                  static_cast<std::ptrdiff_t>(f * config.hop_length) + m, length, w);
              if (src) gx[n * length + *src] += window[m] * frame[m];
            }
          }
        }
      });
}

Tensor istft(const Tensor& spec, const dsp::StftConfig& config, std::size_t length) {
  internal::check_rank(spec, 3, "istft");
  config.validate();
  const std::size_t bins = config.bins();
  const std::size_t batch = spec.dim(0), frames = spec.dim(2);
  check(spec.dim(1) == 2 * bins, "istft",
        fmt::format("expected {} channels, got shape {}", 2 * bins, shape_string(spec.shape())));
  const auto sv = spec.data();
  std::vector<double> out(batch * length);
  for (std::size_t n = 0; n < batch; ++n) {
    dsp::ComplexSpectrogram cs;
    cs.config = config;
    cs.frames = frames;
    cs.original_length = length;
    cs.values.resize(frames * bins);
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t k = 0; k < bins; ++k) {
        cs.at(f, k) = {sv[(n * 2 * bins + k) * frames + f],
                       sv[(n * 2 * bins + bins + k) * frames + f]};
      }
    }
    const auto y = dsp::istft_samples(cs);
    std::copy(y.begin(), y.end(), &out[n * length]);
  }
  return make_result(
      "istft", {batch, length}, std::move(out), {spec},
      [config, batch, length, bins, frames](Node& self) {
        double* gs = sink(self, 0);
        const int w = config.window_size;
        const std::size_t hop = config.hop_length;
        const auto window = dsp::hann_periodic(w);
        const auto& fft = dsp::RealFft::of_size(w);
        const std::size_t padded = (frames - 1) * hop + w;
        std::vector<double> env(padded, 0.0);
        for (std::size_t f = 0; f < frames; ++f) {
          for (int m = 0; m < w; ++m) env[f * hop + m] += window[m] * window[m];
        }
        std::vector<double> gacc(padded);
        std::vector<double> frame(w);
        std::vector<std::complex<double>> spec_grad(bins);
        for (std::size_t n = 0; n < batch; ++n) {
          std::fill(gacc.begin(), gacc.end(), 0.0);
          for (std::size_t i = 0; i < length; ++i) {
            const std::size_t p = i + w / 2;
            gacc[p] = self.grad[n * length + i] / env[p];
          }
          for (std::size_t f = 0; f < frames; ++f) {
            for (int m = 0; m < w; ++m) frame[m] = window[m] * gacc[f * hop + m];
            fft.forward(frame.data(), spec_grad.data());
            for (std::size_t k = 0; k < bins; ++k) {
              const bool edge = (k == 0 || k == bins - 1);
              const double c = (edge ? 1.0 : 2.0) / w;
              gs[(n * 2 * bins + k) * frames + f] += c * spec_grad[k].real();
              if (!edge) gs[(n * 2 * bins + bins + k) * frames + f] += c * spec_grad[k].imag();
            }
          }
        }
      });
}

Tensor log_magnitude(const Tensor& spec, double eps) {
  internal::check_rank(spec, 3, "log_magnitude");
  check(spec.dim(1) % 2 == 0, "log_magnitude",
        fmt::format("odd channel count in {}", shape_string(spec.shape())));
  const std::size_t batch = spec.dim(0), bins = spec.dim(1) / 2, frames = spec.dim(2);
  const std::size_t plane = bins * frames;
  const auto sv = spec.data();
  std::vector<double> out(batch * plane);
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t i = 0; i < plane; ++i) {
      const double re = sv[n * 2 * plane + i];
      const double im = sv[n * 2 * plane + plane + i];
      out[n * plane + i] = 0.5 * std::log(re * re + im * im + eps);
    }
  }
  return make_result("log_magnitude", {batch, bins, frames}, std::move(out), {spec},
                     [spec, batch, plane, eps](Node& self) {
                       double* gs = sink(self, 0);
                       const auto sv = spec.data();
                       for (std::size_t n = 0; n < batch; ++n) {
                         for (std::size_t i = 0; i < plane; ++i) {
                           const double re = sv[n * 2 * plane + i];
                           const double im = sv[n * 2 * plane + plane + i];
                           const double g = self.grad[n * plane + i] / (re * re + im * im + eps);
                           gs[n * 2 * plane + i] += g * re;
                           gs[n * 2 * plane + plane + i] += g * im;
                         }
                       }
                     });
}

}  // namespace aeromamba::ad
