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
#ifndef AEROMAMBA_SRC_AUTODIFF_OPS_INTERNAL_HPP_
#define AEROMAMBA_SRC_AUTODIFF_OPS_INTERNAL_HPP_

#include <fmt/format.h>

#include <string>

#include "aeromamba/autodiff/tensor.hpp"
#include "aeromamba/errors.hpp"

namespace aeromamba::ad::internal {

inline void check(bool ok, const char* op, const std::string& detail) {
  if (!ok) throw ArgumentError(fmt::format("{}: {}", op, detail));
}

inline void check_rank(const Tensor& x, std::size_t rank, const char* op) {
  check(x.defined() && x.rank() == rank, op,
        fmt::format("expected rank {}, got shape {}", rank,
                    x.defined() ? shape_string(x.shape()) : "<undefined>"));
}

// Gradient sink of parent i, or nullptr when it needs none.
inline double* sink(Node& self, std::size_t i) {
  if (i >= self.parents.size()) return nullptr;
  Node* p = self.parents[i].get();
  if (p == nullptr || !p->requires_grad) return nullptr;
  return p->grad_buffer().data();
}

// Splits a shape around axis into outer * len * inner.
struct AxisSplit {
  std::size_t outer = 1, len = 1, inner = 1;
};

inline std::size_t normalize_axis(const Shape& shape, int axis, const char* op) {
  const int r = static_cast<int>(shape.size());
  const int a = axis < 0 ? axis + r : axis;
  check(a >= 0 && a < r, op,
        fmt::format("axis {} out of range for shape {}", axis, shape_string(shape)));
  return static_cast<std::size_t>(a);
}

inline AxisSplit split_axis(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t k = 0; k < axis; ++k) s.outer *= shape[k];
  s.len = shape[axis];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) s.inner *= shape[k];
  return s;
}

}  // namespace aeromamba::ad::internal

#endif  // AEROMAMBA_SRC_AUTODIFF_OPS_INTERNAL_HPP_
