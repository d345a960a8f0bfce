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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "trimodal/optim.h"

using namespace trimodal;

TEST_CASE("momentum step from rest") {
  std::vector<double> p{1.0}, g{0.5}, v{0.0};
  sgd_update(p, g, v, 0.1, 0.9);
  CHECK(v[0] == 0.5);
  CHECK(p[0] == doctest::Approx(0.95).epsilon(1e-15));
}

TEST_CASE("pure velocity decay") {
  std::vector<double> p{2.0}, g{0.0}, v{1.0};
  sgd_update(p, g, v, 0.1, 0.9);
  CHECK(v[0] == 0.9);
  CHECK(p[0] == doctest::Approx(2.0 - 0.09).epsilon(1e-15));
}

TEST_CASE("zero momentum is plain gradient descent") {
  std::vector<double> p{1.0, -2.0}, g{0.25, -0.5}, v{0.0, 0.0};
  for (int step = 0; step < 3; ++step) sgd_update(p, g, v, 0.2, 0.0);
  CHECK(p[0] == doctest::Approx(1.0 - 3 * 0.05));
  CHECK(p[1] == doctest::Approx(-2.0 + 3 * 0.1));
}

TEST_CASE("update rejects mismatched buffers") {
  std::vector<double> p{1.0, 2.0}, g{0.5}, v{0.0, 0.0};
  CHECK_THROWS_AS(sgd_update(p, g, v, 0.1, 0.9), std::invalid_argument);
}

TEST_CASE("sgd_step creates zeroed velocity and uses accumulated grads") {
  Tensor w(Shape{2}, std::vector<double>{1.0, 1.0}, true);
  w.mutable_grad()[0] = 1.0;
  w.mutable_grad()[1] = -2.0;
  OptimizerState state{0.5, 0.9, {}};
  Tensor params[] = {w};
  sgd_step(params, state);
  REQUIRE(state.velocity.size() == 1);
  CHECK(state.velocity[0] == std::vector<double>{1.0, -2.0});
  CHECK(w.values()[0] == 0.5);
  CHECK(w.values()[1] == 2.0);
  sgd_step(params, state);
  CHECK(state.velocity[0][0] == doctest::Approx(1.9));

  OptimizerState wrong{0.5, 0.9, {{0.0}}};
  CHECK_THROWS_AS(sgd_step(params, wrong), std::invalid_argument);
}

TEST_CASE("step schedule") {
  const ScheduleConfig cfg{0.001, 10.0, 70};
  CHECK(lr_at_epoch(0, cfg) == 0.001);
  CHECK(lr_at_epoch(69, cfg) == 0.001);
  CHECK(lr_at_epoch(70, cfg) == 0.0001);
  CHECK(lr_at_epoch(139, cfg) == 0.0001);
  CHECK(lr_at_epoch(140, cfg) == 0.00001);
  double previous = lr_at_epoch(0, cfg);
  for (std::size_t e = 1; e < 400; ++e) {
    const double lr = lr_at_epoch(e, cfg);
    CHECK(lr <= previous);
    CHECK(lr > 0.0);
    previous = lr;
  }
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(validate(ScheduleConfig{0.0, 10.0, 70}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScheduleConfig{0.001, 1.0, 70}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScheduleConfig{0.001, 10.0, 0}), std::invalid_argument);
  CHECK_NOTHROW(validate(ScheduleConfig{}));
}
