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

#include "trimodal/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace trimodal {

GradCheckResult check_gradients(const std::function<Tensor()>& forward,
                                std::span<Tensor> inputs,
                                const GradCheckOptions& options) {
  for (const Tensor& t : inputs) {
    if (!t.is_leaf() || !t.requires_grad()) {
      throw std::invalid_argument("check_gradients: input '" + t.name() +
                                  "' must be a leaf that requires grad");
    }
  }
  for (Tensor& t : inputs) t.zero_grad();
  const Tensor out = forward();
  const std::uint64_t reference = branch_fingerprint(out);
  backward(out);

  GradCheckResult result;
  std::mt19937_64 rng(options.seed);
  auto evaluate = [&](Tensor& t, std::size_t i, double value, std::uint64_t* fp) {
    t.mutable_values()[i] = value;
    const Tensor y = forward();
    if (fp) *fp = branch_fingerprint(y);
    return y.item();
  };

  for (std::size_t n = 0; n < inputs.size(); ++n) {
    Tensor& t = inputs[n];
    const std::vector<double> analytic(t.grad().begin(), t.grad().end());
    std::vector<std::size_t> coords(t.numel());
    std::iota(coords.begin(), coords.end(), 0);
    if (options.max_coords_per_input != 0 && coords.size() > options.max_coords_per_input) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coords_per_input);
      std::sort(coords.begin(), coords.end());
    }
    for (std::size_t i : coords) {
      const double x = t.values()[i];
      std::uint64_t fp_hi = 0;
      std::uint64_t fp_lo = 0;
      evaluate(t, i, x + options.kink_radius, &fp_hi);
      evaluate(t, i, x - options.kink_radius, &fp_lo);
      if (fp_hi != reference || fp_lo != reference) {
        t.mutable_values()[i] = x;
        ++result.skipped;
        continue;
      }
      const double f_hi = evaluate(t, i, x + options.step, nullptr);
      const double f_lo = evaluate(t, i, x - options.step, nullptr);
      t.mutable_values()[i] = x;
      const double numeric = (f_hi - f_lo) / (2.0 * options.step);
      // Rounding in f_hi - f_lo alone can move the quotient by this much.
      const double roundoff = 2.0 * std::numeric_limits<double>::epsilon() *
                              (std::abs(f_hi) + std::abs(f_lo)) / (2.0 * options.step);
      const double a = analytic[i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), options.relative_floor});
      const double rel = std::max(0.0, std::abs(a - numeric) - roundoff) / denom;
      ++result.checked;
      if (rel > result.max_relative_error || result.worst.empty()) {
        result.max_relative_error = rel;
        result.worst = (t.name().empty() ? "input" + std::to_string(n) : t.name()) +
                       "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace trimodal
