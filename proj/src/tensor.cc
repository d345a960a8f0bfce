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

#include "trimodal/tensor.h"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace trimodal {

namespace {

thread_local bool g_grad_enabled = true;

std::shared_ptr<detail::Node> new_node(Shape shape, std::vector<double> values,
                                       bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw std::invalid_argument("tensor: zero-sized dimension in shape " +
                                  shape_str(shape));
    }
  }
  if (shape_numel(shape) != values.size()) {
    throw std::invalid_argument("tensor: shape " + shape_str(shape) +
                                " does not match " +
                                std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<detail::Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  if (requires_grad) node->grad.assign(node->value.size(), 0.0);
  return node;
}

// Post-order over tracked nodes reachable from root; parents precede children.
std::vector<detail::Node*> topo_order(detail::Node* root, bool tracked_only) {
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> seen;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if ((!tracked_only || parent->requires_grad) && seen.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
      continue;
    }
    order.push_back(node);
    stack.pop_back();
  }
  return order;
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  node_ = new_node(std::move(shape), std::vector<double>(n, fill), requires_grad);
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : node_(new_node(std::move(shape), std::move(values), requires_grad)) {}

Tensor Tensor::scalar(double v, bool requires_grad) {
  return Tensor(Shape{1}, std::vector<double>{v}, requires_grad);
}

Tensor Tensor::from_node(std::shared_ptr<detail::Node> node) {
  Tensor t;
  t.node_ = std::move(node);
  return t;
}

void Tensor::check_defined(const char* what) const {
  if (!node_) throw std::logic_error(std::string(what) + ": undefined tensor");
}

const Shape& Tensor::shape() const {
  check_defined("shape");
  return node_->shape;
}

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw std::out_of_range("dim: axis " + std::to_string(axis) +
                            " out of range for shape " + shape_str(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const {
  check_defined("numel");
  return node_->value.size();
}

std::span<const double> Tensor::values() const {
  check_defined("values");
  return node_->value;
}

std::span<double> Tensor::mutable_values() {
  check_defined("mutable_values");
  return node_->value;
}

double Tensor::item() const {
  if (numel() != 1) {
    throw std::logic_error("item: tensor of shape " + shape_str(shape()) +
                           " is not a scalar");
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const {
  check_defined("requires_grad");
  return node_->requires_grad;
}

void Tensor::set_requires_grad(bool on) {
  check_defined("set_requires_grad");
  if (!is_leaf()) {
    throw std::logic_error("set_requires_grad: '" + node_->name +
                           "' is not a leaf");
  }
  node_->requires_grad = on;
  if (on) {
    node_->grad.assign(node_->value.size(), 0.0);
  } else {
    node_->grad.clear();
  }
}

bool Tensor::is_leaf() const {
  check_defined("is_leaf");
  return !node_->backward;
}

std::span<const double> Tensor::grad() const {
  check_defined("grad");
  return node_->grad;
}

std::span<double> Tensor::mutable_grad() {
  check_defined("mutable_grad");
  return node_->grad;
}

void Tensor::zero_grad() {
  check_defined("zero_grad");
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

const std::string& Tensor::name() const {
  check_defined("name");
  return node_->name;
}

Tensor& Tensor::set_name(std::string name) {
  check_defined("set_name");
  node_->name = std::move(name);
  return *this;
}

Tensor Tensor::detach() const {
  Tensor t(shape(), node_->value, false);
  t.node_->name = node_->name;
  return t;
}

Tensor Tensor::clone() const {
  Tensor t(shape(), node_->value, node_->requires_grad);
  t.node_->name = node_->name;
  return t;
}

void backward(const Tensor& output) {
  if (!output.defined()) throw std::logic_error("backward: undefined tensor");
  if (output.numel() != 1) {
    throw std::invalid_argument("backward: output must be a scalar, got shape " +
                                shape_str(output.shape()));
  }
  if (!output.requires_grad()) {
    const std::string& name = output.name();
    throw std::logic_error("backward: tensor '" +
                           (name.empty() ? std::string("<unnamed>") : name) +
                           "' is not tracked; no input in its graph requires grad");
  }
  const auto order = topo_order(output.node(), true);
  for (detail::Node* node : order) {
    if (node->backward) std::fill(node->grad.begin(), node->grad.end(), 0.0);
  }
  detail::Node* root = output.node();
  root->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

std::uint64_t branch_fingerprint(const Tensor& output) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (detail::Node* node : topo_order(output.node(), false)) {
    mix(node->decisions.size());
    for (std::uint32_t d : node->decisions) mix(d);
  }
  return h;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

namespace detail {

namespace {

Tensor finish(Shape shape, std::vector<double> value, std::vector<Tensor> inputs,
              std::string op, BackwardFn fn, std::vector<std::uint32_t> decisions) {
  bool tracked = false;
  if (g_grad_enabled) {
    for (const Tensor& t : inputs) tracked = tracked || t.requires_grad();
  }
  auto node = new_node(std::move(shape), std::move(value), tracked);
  node->name = std::move(op);
  if (tracked) {
    node->parents.reserve(inputs.size());
    for (const Tensor& t : inputs) node->parents.push_back(t.node_ptr());
    node->backward = std::move(fn);
    node->decisions = std::move(decisions);
  }
  return Tensor::from_node(std::move(node));
}

}  // namespace

Tensor make_result(Shape shape, std::vector<double> value,
                   std::initializer_list<const Tensor*> inputs, std::string op,
                   BackwardFn fn, std::vector<std::uint32_t> decisions) {
  std::vector<Tensor> list;
  list.reserve(inputs.size());
  for (const Tensor* t : inputs) list.push_back(*t);
  return finish(std::move(shape), std::move(value), std::move(list), std::move(op),
                std::move(fn), std::move(decisions));
}

Tensor make_result(Shape shape, std::vector<double> value,
                   const std::vector<Tensor>& inputs, std::string op,
                   BackwardFn fn, std::vector<std::uint32_t> decisions) {
  return finish(std::move(shape), std::move(value), inputs, std::move(op),
                std::move(fn), std::move(decisions));
}

std::span<double> parent_grad(Node& self, std::size_t i) {
  return self.parents[i]->grad;
}

std::span<const double> parent_value(const Node& self, std::size_t i) {
  return self.parents[i]->value;
}

}  // namespace detail

}  // namespace trimodal
