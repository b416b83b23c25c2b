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
#include "aeromamba/autodiff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "aeromamba/ssm.hpp"
#include "ops_internal.hpp"

namespace aeromamba::ad {

using internal::check;
using internal::sink;

namespace {

bool is_scalar_operand(const Tensor& a, const Tensor& b) {
  return b.size() == 1 && a.shape() != b.shape();
}

void check_binary(const Tensor& a, const Tensor& b, const char* op) {
  check(a.defined() && b.defined(), op, "undefined operand");
  check(a.shape() == b.shape() || b.size() == 1, op,
        fmt::format("shape mismatch {} vs {}", shape_string(a.shape()),
                    shape_string(b.shape())));
}

// Elementwise unary op from value and derivative functions.
template <typename F, typename D>
Tensor unary(const char* op, const Tensor& x, F f, D df) {
  std::vector<double> out(x.size());
  const auto xs = x.data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f(xs[k]);
  return make_result(op, x.shape(), std::move(out), {x}, [x, df](Node& self) {
    double* gx = sink(self, 0);
    const auto xs = x.data();
    for (std::size_t k = 0; k < self.grad.size(); ++k) {
      gx[k] += self.grad[k] * df(xs[k], self.data[k]);
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  check_binary(a, b, "add");
  const bool bs = is_scalar_operand(a, b);
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += bs ? bv[0] : bv[k];
  return make_result("add", a.shape(), std::move(out), {a, b}, [bs](Node& self) {
    const auto& g = self.grad;
    if (double* ga = sink(self, 0)) {
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    }
    if (double* gb = sink(self, 1)) {
      for (std::size_t k = 0; k < g.size(); ++k) gb[bs ? 0 : k] += g[k];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_binary(a, b, "sub");
  const bool bs = is_scalar_operand(a, b);
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= bs ? bv[0] : bv[k];
  return make_result("sub", a.shape(), std::move(out), {a, b}, [bs](Node& self) {
    const auto& g = self.grad;
    if (double* ga = sink(self, 0)) {
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    }
    if (double* gb = sink(self, 1)) {
      for (std::size_t k = 0; k < g.size(); ++k) gb[bs ? 0 : k] -= g[k];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  check_binary(a, b, "mul");
  const bool bs = is_scalar_operand(a, b);
  std::vector<double> out(a.size());
  const auto av = a.data();
  const auto bv = b.data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = av[k] * (bs ? bv[0] : bv[k]);
  return make_result("mul", a.shape(), std::move(out), {a, b}, [a, b, bs](Node& self) {
    const auto& g = self.grad;
    const auto av = a.data();
    const auto bv = b.data();
    if (double* ga = sink(self, 0)) {
      for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (bs ? bv[0] : bv[k]);
    }
    if (double* gb = sink(self, 1)) {
      for (std::size_t k = 0; k < g.size(); ++k) gb[bs ? 0 : k] += g[k] * av[k];
    }
  });
}

Tensor scale(const Tensor& x, double factor) {
  return unary("scale", x, [factor](double v) { return v * factor; },
               [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& x, double value) {
  return unary("add_scalar", x, [value](double v) { return v + value; },
               [](double, double) { return 1.0; });
}

Tensor sum(const Tensor& x) {
  double acc = 0.0;
  for (double v : x.data()) acc += v;
  return make_result("sum", {}, {acc}, {x}, [](Node& self) {
    double* gx = sink(self, 0);
    const std::size_t n = self.parents[0]->data.size();
    for (std::size_t k = 0; k < n; ++k) gx[k] += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  check(x.size() > 0, "mean", "empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor l1(const Tensor& x, const Tensor& y) {
  check(x.defined() && y.defined() && x.shape() == y.shape(), "l1",
        fmt::format("shape mismatch {} vs {}", shape_string(x.shape()),
                    shape_string(y.shape())));
  check(x.size() > 0, "l1", "empty tensor");
  const auto xv = x.data();
  const auto yv = y.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < xv.size(); ++k) acc += std::abs(xv[k] - yv[k]);
  const double n = static_cast<double>(xv.size());
  return make_result("l1", {}, {acc / n}, {x, y}, [x, y, n](Node& self) {
    const auto xv = x.data();
    const auto yv = y.data();
    const double g = self.grad[0] / n;
    double* gx = sink(self, 0);
    double* gy = sink(self, 1);
    for (std::size_t k = 0; k < xv.size(); ++k) {
      const double d = xv[k] - yv[k];
      const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
      if (gx) gx[k] += g * s;
      if (gy) gy[k] -= g * s;
    }
  });
}

Tensor relu(const Tensor& x) {
  return unary("relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
               [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(const Tensor& x, double slope) {
  return unary("leaky_relu", x, [slope](double v) { return v > 0.0 ? v : slope * v; },
               [slope](double v, double) { return v > 0.0 ? 1.0 : slope; });
}

Tensor silu(const Tensor& x) {
  return unary("silu", x, [](double v) { return v * ssm::sigmoid(v); },
               [](double v, double) {
                 const double s = ssm::sigmoid(v);
                 return s * (1.0 + v * (1.0 - s));
               });
}

Tensor softplus(const Tensor& x) {
  return unary("softplus", x, [](double v) { return ssm::softplus(v); },
               [](double v, double) { return ssm::sigmoid(v); });
}

Tensor sigmoid(const Tensor& x) {
  return unary("sigmoid", x, [](double v) { return ssm::sigmoid(v); },
               [](double, double y) { return y * (1.0 - y); });
}

Tensor glu(const Tensor& x, int axis) {
  const std::size_t a = internal::normalize_axis(x.shape(), axis, "glu");
  const auto s = internal::split_axis(x.shape(), a);
  check(s.len % 2 == 0, "glu",
        fmt::format("axis {} of shape {} is odd", axis, shape_string(x.shape())));
  const std::size_t half = s.len / 2;
  Shape shape = x.shape();
  shape[a] = half;
  std::vector<double> out(numel(shape));
  const auto xv = x.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t c = 0; c < half; ++c) {
      const double* lin = &xv[(o * s.len + c) * s.inner];
      const double* gate = &xv[(o * s.len + c + half) * s.inner];
      double* y = &out[(o * half + c) * s.inner];
      for (std::size_t i = 0; i < s.inner; ++i) y[i] = lin[i] * ssm::sigmoid(gate[i]);
    }
  }
  return make_result("glu", shape, std::move(out), {x}, [x, s, half](Node& self) {
    double* gx = sink(self, 0);
    const auto xv = x.data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t c = 0; c < half; ++c) {
        const std::size_t li = (o * s.len + c) * s.inner;
        const std::size_t gi = (o * s.len + c + half) * s.inner;
        const double* g = &self.grad[(o * half + c) * s.inner];
        for (std::size_t i = 0; i < s.inner; ++i) {
          const double sg = ssm::sigmoid(xv[gi + i]);
          gx[li + i] += g[i] * sg;
          gx[gi + i] += g[i] * xv[li + i] * sg * (1.0 - sg);
        }
      }
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  check(x.defined() && x.rank() >= 1, "linear", "input must have rank >= 1");
  internal::check_rank(w, 2, "linear");
  const std::size_t in = w.dim(0) == 0 ? 0 : w.dim(1);
  const std::size_t out_dim = w.dim(0);
  check(x.dim(-1) == in, "linear",
        fmt::format("input {} does not match weight {}", shape_string(x.shape()),
                    shape_string(w.shape())));
  if (b.defined()) {
    check(b.rank() == 1 && b.dim(0) == out_dim, "linear",
          fmt::format("bias {} does not match weight {}", shape_string(b.shape()),
                      shape_string(w.shape())));
  }
  const std::size_t rows = x.size() / in;
  // Transposed copy so the inner loop runs over outputs with a fixed input
  // order per output.
  std::vector<double> wt(in * out_dim);
  const auto wv = w.data();
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t k = 0; k < in; ++k) wt[k * out_dim + o] = wv[o * in + k];
  }
  Shape shape = x.shape();
  shape.back() = out_dim;
  std::vector<double> out(rows * out_dim, 0.0);
  const auto xv = x.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double* y = &out[r * out_dim];
    const double* xr = &xv[r * in];
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xr[k];
      const double* wk = &wt[k * out_dim];
      for (std::size_t o = 0; o < out_dim; ++o) y[o] += wk[o] * xk;
    }
    if (b.defined()) {
      const auto bv = b.data();
      for (std::size_t o = 0; o < out_dim; ++o) y[o] += bv[o];
    }
  }
  return make_result(
      "linear", shape, std::move(out), {x, w, b}, [x, w, rows, in, out_dim](Node& self) {
        const auto& g = self.grad;
        const auto xv = x.data();
        const auto wv = w.data();
        if (double* gx = sink(self, 0)) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t o = 0; o < out_dim; ++o) {
              const double go = g[r * out_dim + o];
              if (go == 0.0) continue;
              const double* wo = &wv[o * in];
              double* gxr = &gx[r * in];
              for (std::size_t k = 0; k < in; ++k) gxr[k] += go * wo[k];
            }
          }
        }
        if (double* gw = sink(self, 1)) {
          for (std::size_t r = 0; r < rows; ++r) {
            const double* xr = &xv[r * in];
            for (std::size_t o = 0; o < out_dim; ++o) {
              const double go = g[r * out_dim + o];
              if (go == 0.0) continue;
              double* gwo = &gw[o * in];
              for (std::size_t k = 0; k < in; ++k) gwo[k] += go * xr[k];
            }
          }
        }
        if (double* gb = sink(self, 2)) {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g[r * out_dim + o];
          }
        }
      });
}

Tensor rms_norm(const Tensor& x, const Tensor& gain, double eps) {
  check(x.defined() && x.rank() >= 1, "rms_norm", "input must have rank >= 1");
  const std::size_t c = x.dim(-1);
  check(gain.defined() && gain.rank() == 1 && gain.dim(0) == c, "rms_norm",
        fmt::format("gain {} does not match input {}",
                    gain.defined() ? shape_string(gain.shape()) : "<undefined>",
                    shape_string(x.shape())));
  const std::size_t rows = c == 0 ? 0 : x.size() / c;
  std::vector<double> inv(rows);
  std::vector<double> out(x.size());
  const auto xv = x.data();
  const auto gv = gain.data();
  for (std::size_t r = 0; r < rows; ++r) {
    double ss = 0.0;
    for (std::size_t k = 0; k < c; ++k) ss += xv[r * c + k] * xv[r * c + k];
    inv[r] = 1.0 / std::sqrt(ss / static_cast<double>(c) + eps);
    for (std::size_t k = 0; k < c; ++k) out[r * c + k] = xv[r * c + k] * inv[r] * gv[k];
  }
  return make_result("rms_norm", x.shape(), std::move(out), {x, gain},
                     [x, gain, inv, rows, c](Node& self) {
                       const auto& g = self.grad;
                       const auto xv = x.data();
                       const auto gv = gain.data();
                       double* gx = sink(self, 0);
                       double* gg = sink(self, 1);
                       for (std::size_t r = 0; r < rows; ++r) {
                         const double* xr = &xv[r * c];
                         const double* gr = &g[r * c];
                         const double s = inv[r];
                         if (gg) {
                           for (std::size_t k = 0; k < c; ++k) gg[k] += gr[k] * xr[k] * s;
                         }
                         if (gx) {
                           // d/dx of x*s*g with s = (mean x^2 + eps)^-1/2.
                           double dot = 0.0;
                           for (std::size_t k = 0; k < c; ++k) dot += gr[k] * gv[k] * xr[k];
                           const double coef = dot * s * s * s / static_cast<double>(c);
                           for (std::size_t k = 0; k < c; ++k) {
                             gx[r * c + k] += gr[k] * gv[k] * s - coef * xr[k];
                           }
                         }
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  check(numel(shape) == x.size(), "reshape",
        fmt::format("cannot view {} as {}", shape_string(x.shape()), shape_string(shape)));
  return make_result("reshape", std::move(shape), std::vector<double>(x.data().begin(), x.data().end()),
                     {x}, [](Node& self) {
                       double* gx = sink(self, 0);
                       for (std::size_t k = 0; k < self.grad.size(); ++k) gx[k] += self.grad[k];
                     });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  check(!parts.empty(), "concat", "no inputs");
  const std::size_t a = internal::normalize_axis(parts[0].shape(), axis, "concat");
  Shape shape = parts[0].shape();
  shape[a] = 0;
  std::vector<std::size_t> lens;
  for (const Tensor& p : parts) {
    Shape ps = p.shape();
    check(ps.size() == shape.size(), "concat", "rank mismatch");
    lens.push_back(ps[a]);
    shape[a] += ps[a];
    ps[a] = 0;
    Shape ref = parts[0].shape();
    ref[a] = 0;
    check(ps == ref, "concat",
          fmt::format("shape {} incompatible with {}", shape_string(p.shape()),
                      shape_string(parts[0].shape())));
  }
  const auto s = internal::split_axis(shape, a);
  std::vector<double> out(numel(shape));
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto pv = parts[i].data();
    for (std::size_t o = 0; o < s.outer; ++o) {
      std::copy_n(&pv[o * lens[i] * s.inner], lens[i] * s.inner,
                  &out[(o * s.len + offset) * s.inner]);
    }
    offset += lens[i];
  }
  return make_result("concat", shape, std::move(out), parts, [s, lens](Node& self) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < lens.size(); ++i) {
      if (double* gp = sink(self, i)) {
        for (std::size_t o = 0; o < s.outer; ++o) {
          const double* g = &self.grad[(o * s.len + offset) * s.inner];
          double* d = &gp[o * lens[i] * s.inner];
          for (std::size_t k = 0; k < lens[i] * s.inner; ++k) d[k] += g[k];
        }
      }
      offset += lens[i];
    }
  });
}

Tensor slice(const Tensor& x, int axis, std::size_t begin, std::size_t length) {
  const std::size_t a = internal::normalize_axis(x.shape(), axis, "slice");
  const auto s = internal::split_axis(x.shape(), a);
  check(begin + length <= s.len, "slice",
        fmt::format("range [{}, {}) exceeds axis of length {}", begin, begin + length, s.len));
  Shape shape = x.shape();
  shape[a] = length;
  std::vector<double> out(numel(shape));
  const auto xv = x.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(&xv[(o * s.len + begin) * s.inner], length * s.inner,
                &out[o * length * s.inner]);
  }
  return make_result("slice", shape, std::move(out), {x}, [s, begin, length](Node& self) {
    double* gx = sink(self, 0);
    for (std::size_t o = 0; o < s.outer; ++o) {
      const double* g = &self.grad[o * length * s.inner];
      double* d = &gx[(o * s.len + begin) * s.inner];
      for (std::size_t k = 0; k < length * s.inner; ++k) d[k] += g[k];
    }
  });
}

Tensor pad_end(const Tensor& x, int axis, std::size_t count) {
  if (count == 0) return x;
  const std::size_t a = internal::normalize_axis(x.shape(), axis, "pad_end");
  Shape zshape = x.shape();
  zshape[a] = count;
  return concat({x, Tensor::zeros(zshape)}, static_cast<int>(a));
}

Tensor reverse(const Tensor& x, int axis) {
  const std::size_t a = internal::normalize_axis(x.shape(), axis, "reverse");
  const auto s = internal::split_axis(x.shape(), a);
  auto index = [s](std::size_t o, std::size_t l, std::size_t i) {
    return (o * s.len + l) * s.inner + i;
  };
  std::vector<double> out(x.size());
  const auto xv = x.data();
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t l = 0; l < s.len; ++l) {
      for (std::size_t i = 0; i < s.inner; ++i) {
        out[index(o, s.len - 1 - l, i)] = xv[index(o, l, i)];
      }
    }
  }
  return make_result("reverse", x.shape(), std::move(out), {x}, [s, index](Node& self) {
    double* gx = sink(self, 0);
    for (std::size_t o = 0; o < s.outer; ++o) {
      for (std::size_t l = 0; l < s.len; ++l) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          gx[index(o, l, i)] += self.grad[index(o, s.len - 1 - l, i)];
        }
      }
    }
  });
}

Tensor transpose_last(const Tensor& x) {
  check(x.defined() && x.rank() >= 2, "transpose_last", "input must have rank >= 2");
  const std::size_t rows = x.dim(-2);
  const std::size_t cols = x.dim(-1);
  const std::size_t outer = x.size() / std::max<std::size_t>(1, rows * cols);
  Shape shape = x.shape();
  std::swap(shape[shape.size() - 1], shape[shape.size() - 2]);
  std::vector<double> out(x.size());
  const auto xv = x.data();
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = &xv[o * rows * cols];
    double* dst = &out[o * rows * cols];
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
    }
  }
  return make_result("transpose_last", shape, std::move(out), {x},
                     [outer, rows, cols](Node& self) {
                       double* gx = sink(self, 0);
                       for (std::size_t o = 0; o < outer; ++o) {
                         const double* g = &self.grad[o * rows * cols];
                         double* d = &gx[o * rows * cols];
                         for (std::size_t r = 0; r < rows; ++r) {
                           for (std::size_t c = 0; c < cols; ++c) d[r * cols + c] += g[c * rows + r];
                         }
                       }
                     });
}

}  // namespace aeromamba::ad
