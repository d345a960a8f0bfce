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
#include <string>
#include <vector>

#include "trimodal/gradcheck.h"
#include "trimodal/matchmap.h"

// Built-in verification suites shared by the command-line tool and tests.
namespace trimodal {

struct GradSuiteLine {
  std::string name;
  GradCheckResult result;
};

/// Finite-difference checks of every differentiable primitive and of the
/// full encoder -> matchmap -> pooling -> ranking-loss path, on small random
/// inputs drawn from `seed`.
std::vector<GradSuiteLine> gradient_suite(std::uint64_t seed,
                                          const GradCheckOptions& options = {});

// Naive loop references. Localized vectors are rows of a row-major [n, d]
// buffer; the matchmap is [nx, ny].
std::vector<double> reference_matchmap(const std::vector<double>& x, std::size_t nx,
                                       const std::vector<double>& y, std::size_t ny,
                                       std::size_t d, bool normalize);
// Mean over the left axis of the max over the right axis, or the reverse.
double reference_pool(const std::vector<double>& m, std::size_t nx, std::size_t ny,
                      bool mean_over_left);

struct OracleSuiteLine {
  std::string name;
  std::size_t instances = 0;
  double max_deviation = 0.0;
};

/// Compares matchmaps, all pooling modes and both ranking losses against the
/// naive references on `instances` random problems.
std::vector<OracleSuiteLine> oracle_suite(std::uint64_t seed, std::size_t instances);

}  // namespace trimodal
