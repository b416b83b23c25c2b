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
#include "aeromamba/autodiff/tensor.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <unordered_set>
#include <utility>

#include "aeromamba/errors.hpp"

namespace aeromamba::ad {

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  return fmt::format("[{}]", fmt::join(shape, ", "));
}

std::vector<double>& Node::grad_buffer() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (numel(shape) != data.size()) {
    throw ArgumentError(fmt::format("tensor of shape {} cannot hold {} values",
                                    shape_string(shape), data.size()));
  }
  node_ = std::make_shared<Node>();
  node_->op = "leaf";
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value) { return Tensor({}, {value}); }

std::size_t Tensor::dim(int axis) const {
  const int r = static_cast<int>(rank());
  const int a = axis < 0 ? axis + r : axis;
  if (a < 0 || a >= r) {
    throw ArgumentError(fmt::format("axis {} out of range for shape {}", axis,
                                    shape_string(shape())));
  }
  return node_->shape[a];
}

double Tensor::item() const {
  if (size() != 1) {
    throw ArgumentError(fmt::format("item() on tensor of shape {}",
                                    shape_string(shape())));
  }
  return node_->data[0];
}

Tensor Tensor::detach() const { return Tensor(shape(), node_->data, false); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor make_result(std::string op, Shape shape, std::vector<double> data,
                   const std::vector<Tensor>& parents,
                   std::function<void(Node&)> backward_fn) {
  Tensor out(std::move(shape), std::move(data));
  out.node()->op = std::move(op);
  if (!g_grad_enabled) return out;
  bool any = false;
  for (const Tensor& p : parents) any = any || (p.defined() && p.requires_grad());
  if (!any) return out;
  Node& n = *out.node();
  n.requires_grad = true;
  for (const Tensor& p : parents) n.parents.push_back(p.node());
  n.backward = std::move(backward_fn);
  return out;
}

void backward(const Tensor& loss) {
  if (!loss.defined() || loss.size() != 1) {
    throw ArgumentError(fmt::format(
        "backward needs a scalar loss, got shape {}",
        loss.defined() ? shape_string(loss.shape()) : std::string("<undefined>")));
  }
  if (!loss.requires_grad()) return;

  // Iterative post-order DFS gives a topological order (parents first).
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{loss.node().get(), 0}};
  seen.insert(loss.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent != nullptr && parent->requires_grad && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  loss.node()->grad_buffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (!node->backward) continue;
    if (!node->grad.empty()) node->backward(*node);
    // Interior adjoints are consumed; a second sweep starts from scratch.
    std::vector<double>().swap(node->grad);
  }
}

}  // namespace aeromamba::ad
