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
#include <span>
#include <string>

#include "trimodal/tensor.h"

namespace trimodal {

struct GradCheckOptions {
  double step = 1e-5;
  // Coordinates whose perturbation by +/- kink_radius changes any piecewise
  // decision (ReLU mask, argmax, hinge activity) are skipped.
  double kink_radius = 1e-3;
  // Denominator floor of the relative error
  //   max(0, |a - n| - r) / max(|a|, |n|, floor)
  // where r bounds the rounding error of the central difference itself.
  double relative_floor = 1e-6;
  // Upper bound on coordinates probed per input; 0 probes all of them.
  std::size_t max_coords_per_input = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::string worst;  // "<tensor>[<index>]"
};

/// Compares analytic gradients of the scalar produced by `forward` against
/// central finite differences over every tensor in `inputs`. Inputs must be
/// requires_grad leaves; their values are restored on return.
GradCheckResult check_gradients(const std::function<Tensor()>& forward,
                                std::span<Tensor> inputs,
                                const GradCheckOptions& options = {});

}  // namespace trimodal
