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

#include "trimodal/optim.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trimodal {

void sgd_update(std::span<double> param, std::span<const double> grad,
                std::span<double> velocity, double lr, double momentum) {
  if (param.size() != grad.size() || param.size() != velocity.size()) {
    throw std::invalid_argument("sgd_update: size mismatch (param " +
                                std::to_string(param.size()) + ", grad " +
                                std::to_string(grad.size()) + ", velocity " +
                                std::to_string(velocity.size()) + ")");
  }
  for (std::size_t i = 0; i < param.size(); ++i) {
    velocity[i] = momentum * velocity[i] + grad[i];
    param[i] -= lr * velocity[i];
  }
}

void sgd_step(std::span<Tensor> params, OptimizerState& state) {
  if (!(state.learning_rate > 0.0)) {
    throw std::invalid_argument("sgd_step: learning rate must be positive");
  }
  if (state.momentum < 0.0 || state.momentum >= 1.0) {
    throw std::invalid_argument("sgd_step: momentum must lie in [0, 1)");
  }
  if (state.velocity.empty()) {
    state.velocity.reserve(params.size());
    for (const Tensor& p : params) state.velocity.emplace_back(p.numel(), 0.0);
  }
  if (state.velocity.size() != params.size()) {
    throw std::invalid_argument("sgd_step: optimizer holds " +
                                std::to_string(state.velocity.size()) +
                                " velocity buffers for " + std::to_string(params.size()) +
                                " parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    if (!p.requires_grad()) {
      throw std::invalid_argument("sgd_step: parameter '" + p.name() +
                                  "' does not require grad");
    }
    if (state.velocity[i].size() != p.numel()) {
      throw std::invalid_argument("sgd_step: velocity shape mismatch for '" + p.name() + "'");
    }
    sgd_update(p.mutable_values(), p.grad(), state.velocity[i], state.learning_rate,
               state.momentum);
  }
}

void validate(const ScheduleConfig& cfg) {
  if (!(cfg.base_lr > 0.0)) throw std::invalid_argument("schedule: base_lr must be positive");
  if (!(cfg.decay_ratio > 1.0)) throw std::invalid_argument("schedule: decay_ratio must exceed 1");
  if (cfg.decay_every == 0) throw std::invalid_argument("schedule: decay_every must be positive");
}

double lr_at_epoch(std::size_t epoch, const ScheduleConfig& cfg) {
  validate(cfg);
  const auto steps = static_cast<double>(epoch / cfg.decay_every);
  return cfg.base_lr / std::pow(cfg.decay_ratio, steps);
}

}  // namespace trimodal
