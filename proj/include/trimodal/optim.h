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
#include <span>
#include <vector>

#include "trimodal/tensor.h"

namespace trimodal {

/// SGD with classic momentum:
///   v <- momentum * v + g
///   p <- p - lr * v
struct OptimizerState {
  double learning_rate = 0.001;
  double momentum = 0.9;
  // One buffer per parameter, created zeroed on the first step.
  std::vector<std::vector<double>> velocity;
};

// Updates raw buffers in place. All three spans must have equal length.
void sgd_update(std::span<double> param, std::span<const double> grad,
                std::span<double> velocity, double lr, double momentum);

// Steps every tensor in `params` using its accumulated grad.
void sgd_step(std::span<Tensor> params, OptimizerState& state);

struct ScheduleConfig {
  double base_lr = 0.001;
  double decay_ratio = 10.0;
  std::size_t decay_every = 70;
};

void validate(const ScheduleConfig& cfg);

// base_lr / decay_ratio^floor(epoch / decay_every)
double lr_at_epoch(std::size_t epoch, const ScheduleConfig& cfg);

}  // namespace trimodal
