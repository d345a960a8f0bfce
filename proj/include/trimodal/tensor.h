// Copyright 2026 The Trimodal Embedding Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace trimodal {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// One vertex of the computation graph. Leaves have no backward function.
struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // sized iff requires_grad
  bool requires_grad = false;
  std::string name;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;
  // Piecewise branch taken by the forward pass (argmax slots, ReLU masks).
  // Two forward passes with equal decisions lie on the same smooth piece.
  std::vector<std::uint32_t> decisions;
};

}  // namespace detail

/// Dense row-major tensor of doubles with an optional reverse-mode graph.
///
/// Tensor is a shared handle: copies alias the same storage. Use clone() or
/// detach() for an independent copy.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0, bool requires_grad = false);
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor scalar(double v, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const double> values() const;
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t flat_index) const { return values()[flat_index]; }

  bool requires_grad() const;
  void set_requires_grad(bool on);
  bool is_leaf() const;
  std::span<const double> grad() const;
  std::span<double> mutable_grad();
  void zero_grad();

  const std::string& name() const;
  Tensor& set_name(std::string name);

  // Same values, no graph history, no grad.
  Tensor detach() const;
  // Independent leaf with copied values and the same requires_grad flag.
  Tensor clone() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }
  static Tensor from_node(std::shared_ptr<detail::Node> node);

 private:
  void check_defined(const char* what) const;

  std::shared_ptr<detail::Node> node_;
};

/// Populates grad buffers with d(output)/d(t) for every tracked tensor t in
/// the graph of `output`. Leaf gradients accumulate across calls; interior
/// gradients are reset on each call so the same graph may be reused.
void backward(const Tensor& output);

/// Hash of every piecewise decision in the graph below `output`, in a fixed
/// traversal order.
std::uint64_t branch_fingerprint(const Tensor& output);

bool grad_enabled();

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

namespace detail {

using BackwardFn = std::function<void(Node&)>;

// Builds an op result. The graph edge and backward function are attached
// only when recording is enabled and some input requires grad.
Tensor make_result(Shape shape, std::vector<double> value,
                   std::initializer_list<const Tensor*> inputs, std::string op,
                   BackwardFn fn, std::vector<std::uint32_t> decisions = {});
Tensor make_result(Shape shape, std::vector<double> value,
                   const std::vector<Tensor>& inputs, std::string op,
                   BackwardFn fn, std::vector<std::uint32_t> decisions = {});

// Grad buffer of a parent, or an empty span if it is not tracked.
std::span<double> parent_grad(Node& self, std::size_t i);
std::span<const double> parent_value(const Node& self, std::size_t i);

}  // namespace detail

}  // namespace trimodal
