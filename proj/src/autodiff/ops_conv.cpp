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
#include <Eigen/Core>

#include <algorithm>
#include <utility>

#include "aeromamba/autodiff/ops.hpp"
#include "ops_internal.hpp"

namespace aeromamba::ad {

using internal::check;
using internal::sink;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using Map = Eigen::Map<RowMatrix>;

struct ConvGeometry {
  std::size_t batch, c_in, c_out, length, kernel, out_len, cin_g, cout_g;
  int stride, padding, groups;
};

// col[(ci * K + k), t] = x[ci, t * stride + k - padding] for the channels of
// one group.
void im2col(const double* x, const ConvGeometry& g, std::size_t group, double* col) {
  for (std::size_t ci = 0; ci < g.cin_g; ++ci) {
    const double* xc = x + (group * g.cin_g + ci) * g.length;
    for (std::size_t k = 0; k < g.kernel; ++k) {
      double* row = col + (ci * g.kernel + k) * g.out_len;
      for (std::size_t t = 0; t < g.out_len; ++t) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * g.stride + k) - g.padding;
        row[t] = (src >= 0 && src < static_cast<std::ptrdiff_t>(g.length)) ? xc[src] : 0.0;
      }
    }
  }
}

void col2im(const double* col, const ConvGeometry& g, std::size_t group, double* gx) {
  for (std::size_t ci = 0; ci < g.cin_g; ++ci) {
    double* xc = gx + (group * g.cin_g + ci) * g.length;
    for (std::size_t k = 0; k < g.kernel; ++k) {
      const double* row = col + (ci * g.kernel + k) * g.out_len;
      for (std::size_t t = 0; t < g.out_len; ++t) {
        const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t * g.stride + k) - g.padding;
        if (src >= 0 && src < static_cast<std::ptrdiff_t>(g.length)) xc[src] += row[t];
      }
    }
  }
}

void check_bias(const Tensor& b, std::size_t channels, const char* op) {
  if (!b.defined()) return;
  check(b.rank() == 1 && b.dim(0) == channels, op,
        fmt::format("bias {} does not match {} output channels", shape_string(b.shape()),
                    channels));
}

}  // namespace

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b, int stride, int padding,
              int groups) {
  internal::check_rank(x, 3, "conv1d");
  internal::check_rank(w, 3, "conv1d");
  check(stride >= 1 && padding >= 0 && groups >= 1, "conv1d",
        fmt::format("invalid stride {} padding {} groups {}", stride, padding, groups));
  ConvGeometry g{};
  g.batch = x.dim(0);
  g.c_in = x.dim(1);
  g.length = x.dim(2);
  g.c_out = w.dim(0);
  g.kernel = w.dim(2);
  g.stride = stride;
  g.padding = padding;
  g.groups = groups;
  const auto ug = static_cast<std::size_t>(groups);
  check(g.c_in % ug == 0 && g.c_out % ug == 0 && w.dim(1) == g.c_in / ug, "conv1d",
        fmt::format("input {} incompatible with weight {} and {} groups",
                    shape_string(x.shape()), shape_string(w.shape()), groups));
  check(g.length + 2 * padding >= g.kernel, "conv1d",
        fmt::format("input length {} shorter than kernel {}", g.length, g.kernel));
  check_bias(b, g.c_out, "conv1d");
  g.cin_g = g.c_in / ug;
  g.cout_g = g.c_out / ug;
  g.out_len = (g.length + 2 * padding - g.kernel) / stride + 1;

  std::vector<double> out(g.batch * g.c_out * g.out_len, 0.0);
  std::vector<double> col(g.cin_g * g.kernel * g.out_len);
  const auto xv = x.data();
  const auto wv = w.data();
  const std::size_t ck = g.cin_g * g.kernel;
  for (std::size_t n = 0; n < g.batch; ++n) {
    for (std::size_t grp = 0; grp < ug; ++grp) {
      im2col(&xv[n * g.c_in * g.length], g, grp, col.data());
      ConstMap wm(&wv[grp * g.cout_g * ck], g.cout_g, ck);
      ConstMap cm(col.data(), ck, g.out_len);
      Map ym(&out[(n * g.c_out + grp * g.cout_g) * g.out_len], g.cout_g, g.out_len);
      ym.noalias() = wm * cm;
    }
    if (b.defined()) {
      const auto bv = b.data();
      for (std::size_t co = 0; co < g.c_out; ++co) {
        double* y = &out[(n * g.c_out + co) * g.out_len];
        for (std::size_t t = 0; t < g.out_len; ++t) y[t] += bv[co];
      }
    }
  }
  return make_result(
      "conv1d", {g.batch, g.c_out, g.out_len}, std::move(out), {x, w, b},
      [x, w, g, ug, ck](Node& self) {
        double* gx = sink(self, 0);
        double* gw = sink(self, 1);
        double* gb = sink(self, 2);
        const auto xv = x.data();
        const auto wv = w.data();
        std::vector<double> col(ck * g.out_len);
        std::vector<double> gcol(ck * g.out_len);
        for (std::size_t n = 0; n < g.batch; ++n) {
          for (std::size_t grp = 0; grp < ug; ++grp) {
            ConstMap gy(&self.grad[(n * g.c_out + grp * g.cout_g) * g.out_len], g.cout_g,
                        g.out_len);
            if (gw) {
              im2col(&xv[n * g.c_in * g.length], g, grp, col.data());
              Map gwm(&gw[grp * g.cout_g * ck], g.cout_g, ck);
              gwm.noalias() += gy * ConstMap(col.data(), ck, g.out_len).transpose();
            }
            if (gx) {
              Map gc(gcol.data(), ck, g.out_len);
              gc.noalias() = ConstMap(&wv[grp * g.cout_g * ck], g.cout_g, ck).transpose() * gy;
              col2im(gcol.data(), g, grp, &gx[n * g.c_in * g.length]);
            }
          }
          if (gb) {
            for (std::size_t co = 0; co < g.c_out; ++co) {
              const double* gy = &self.grad[(n * g.c_out + co) * g.out_len];
              for (std::size_t t = 0; t < g.out_len; ++t) gb[co] += gy[t];
            }
          }
        }
      });
}

Tensor conv_transpose1d(const Tensor& x, const Tensor& w, const Tensor& b, int stride) {
  internal::check_rank(x, 3, "conv_transpose1d");
  internal::check_rank(w, 3, "conv_transpose1d");
  check(stride >= 1, "conv_transpose1d", fmt::format("invalid stride {}", stride));
  const std::size_t batch = x.dim(0), c_in = x.dim(1), len = x.dim(2);
  check(w.dim(0) == c_in, "conv_transpose1d",
        fmt::format("input {} incompatible with weight {}", shape_string(x.shape()),
                    shape_string(w.shape())));
  const std::size_t c_out = w.dim(1), kernel = w.dim(2);
  check(len >= 1, "conv_transpose1d", "empty input");
  check_bias(b, c_out, "conv_transpose1d");
  const auto s = static_cast<std::size_t>(stride);
  const std::size_t out_len = (len - 1) * s + kernel;
  const std::size_t ck = c_out * kernel;

  std::vector<double> out(batch * c_out * out_len, 0.0);
  std::vector<double> cols(ck * len);
  const auto xv = x.data();
  ConstMap wm(w.data().data(), c_in, ck);
  for (std::size_t n = 0; n < batch; ++n) {
    Map cm(cols.data(), ck, len);
    cm.noalias() = wm.transpose() * ConstMap(&xv[n * c_in * len], c_in, len);
    for (std::size_t co = 0; co < c_out; ++co) {
      double* y = &out[(n * c_out + co) * out_len];
      for (std::size_t k = 0; k < kernel; ++k) {
        const double* row = &cols[(co * kernel + k) * len];
        for (std::size_t t = 0; t < len; ++t) y[t * s + k] += row[t];
      }
      if (b.defined()) {
        const double bias = b.data()[co];
        for (std::size_t t = 0; t < out_len; ++t) y[t] += bias;
      }
    }
  }
  return make_result(
      "conv_transpose1d", {batch, c_out, out_len}, std::move(out), {x, w, b},
      [x, w, batch, c_in, len, c_out, kernel, s, out_len, ck](Node& self) {
        double* gx = sink(self, 0);
        double* gw = sink(self, 1);
        double* gb = sink(self, 2);
        const auto xv = x.data();
        ConstMap wm(w.data().data(), c_in, ck);
        std::vector<double> gcols(ck * len);
        for (std::size_t n = 0; n < batch; ++n) {
          for (std::size_t co = 0; co < c_out; ++co) {
            const double* gy = &self.grad[(n * c_out + co) * out_len];
            for (std::size_t k = 0; k < kernel; ++k) {
              double* row = &gcols[(co * kernel + k) * len];
              for (std::size_t t = 0; t < len; ++t) row[t] = gy[t * s + k];
            }
            if (gb) {
              for (std::size_t t = 0; t < out_len; ++t) gb[co] += gy[t];
            }
          }
          ConstMap gc(gcols.data(), ck, len);
          if (gx) {
            Map gxm(&gx[n * c_in * len], c_in, len);
            gxm.noalias() += wm * gc;
          }
          if (gw) {
            Map gwm(gw, c_in, ck);
            gwm.noalias() += ConstMap(&xv[n * c_in * len], c_in, len) * gc.transpose();
          }
        }
      });
}

Tensor depthwise_causal_conv1d(const Tensor& x, const Tensor& w, const Tensor& b,
                               const ConvHistory* history, ConvHistory* history_out) {
  internal::check_rank(x, 3, "depthwise_causal_conv1d");
  internal::check_rank(w, 2, "depthwise_causal_conv1d");
  const std::size_t batch = x.dim(0), len = x.dim(1), ch = x.dim(2);
  const std::size_t kernel = w.dim(1);
  check(w.dim(0) == ch && kernel >= 1, "depthwise_causal_conv1d",
        fmt::format("input {} incompatible with weight {}", shape_string(x.shape()),
                    shape_string(w.shape())));
  check_bias(b, ch, "depthwise_causal_conv1d");
  const std::size_t lead = kernel - 1;
  if (history != nullptr) {
    check(history->rows.size() == batch * lead * ch, "depthwise_causal_conv1d",
          fmt::format("history holds {} values, expected {}", history->rows.size(),
                      batch * lead * ch));
  }
  // Extended input: lead history rows followed by x, per batch item.
  const std::size_t ext_len = lead + len;
  std::vector<double> ext(batch * ext_len * ch, 0.0);
  const auto xv = x.data();
  for (std::size_t n = 0; n < batch; ++n) {
    if (history != nullptr) {
      std::copy_n(&history->rows[n * lead * ch], lead * ch, &ext[n * ext_len * ch]);
    }
    std::copy_n(&xv[n * len * ch], len * ch, &ext[(n * ext_len + lead) * ch]);
  }
  std::vector<double> out(batch * len * ch);
  const auto wv = w.data();
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t t = 0; t < len; ++t) {
      double* y = &out[(n * len + t) * ch];
      for (std::size_t c = 0; c < ch; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kernel; ++k) {
          acc += wv[c * kernel + k] * ext[(n * ext_len + t + k) * ch + c];
        }
        y[c] = b.defined() ? acc + b.data()[c] : acc;
      }
    }
  }
  if (history_out != nullptr) {
    history_out->rows.resize(batch * lead * ch);
    for (std::size_t n = 0; n < batch; ++n) {
      std::copy_n(&ext[(n * ext_len + len) * ch], lead * ch, &history_out->rows[n * lead * ch]);
    }
  }
  return make_result(
      "depthwise_causal_conv1d", x.shape(), std::move(out), {x, w, b},
      [w, ext = std::move(ext), batch, len, ch, kernel, ext_len, lead](Node& self) {
        double* gx = sink(self, 0);
        double* gw = sink(self, 1);
        double* gb = sink(self, 2);
        const auto wv = w.data();
        for (std::size_t n = 0; n < batch; ++n) {
          for (std::size_t t = 0; t < len; ++t) {
            const double* g = &self.grad[(n * len + t) * ch];
            for (std::size_t c = 0; c < ch; ++c) {
              if (gb) gb[c] += g[c];
              for (std::size_t k = 0; k < kernel; ++k) {
                const std::size_t e = t + k;
                if (gw) gw[c * kernel + k] += g[c] * ext[(n * ext_len + e) * ch + c];
                if (gx && e >= lead) gx[(n * len + e - lead) * ch + c] += g[c] * wv[c * kernel + k];
              }
            }
          }
        }
      });
}

Tensor avg_pool1d(const Tensor& x, int kernel, int stride, int padding) {
  internal::check_rank(x, 3, "avg_pool1d");
  check(kernel >= 1 && stride >= 1 && padding >= 0 && padding < kernel, "avg_pool1d",
        fmt::format("invalid kernel {} stride {} padding {}", kernel, stride, padding));
  const std::size_t rows = x.dim(0) * x.dim(1);
  const auto len = static_cast<std::ptrdiff_t>(x.dim(2));
  check(len + 2 * padding >= kernel, "avg_pool1d",
        fmt::format("input length {} shorter than kernel {}", len, kernel));
  const std::size_t out_len = static_cast<std::size_t>((len + 2 * padding - kernel) / stride + 1);
  std::vector<double> out(rows * out_len);
  const auto xv = x.data();
  auto window = [=](std::size_t t) {
    const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(t) * stride - padding;
    return std::pair{std::max<std::ptrdiff_t>(0, start),
                     std::min<std::ptrdiff_t>(len, start + kernel)};
  };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t t = 0; t < out_len; ++t) {
      const auto [lo, hi] = window(t);
      double acc = 0.0;
      for (std::ptrdiff_t i = lo; i < hi; ++i) acc += xv[r * len + i];
      out[r * out_len + t] = acc / static_cast<double>(hi - lo);
    }
  }
  return make_result("avg_pool1d", {x.dim(0), x.dim(1), out_len}, std::move(out), {x},
                     [rows, out_len, len, window](Node& self) {
                       double* gx = sink(self, 0);
                       for (std::size_t r = 0; r < rows; ++r) {
                         for (std::size_t t = 0; t < out_len; ++t) {
                           const auto [lo, hi] = window(t);
                           const double g =
                               self.grad[r * out_len + t] / static_cast<double>(hi - lo);
                           for (std::ptrdiff_t i = lo; i < hi; ++i) gx[r * len + i] += g;
                         }
                       }
                     });
}

}  // namespace aeromamba::ad
