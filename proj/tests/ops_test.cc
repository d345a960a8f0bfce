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
#include <random>

#include "doctest.h"
#include "test_util.h"
#include "trimodal/ops.h"

using namespace trimodal;

namespace {

// out[y][x][o] = b[o] + sum_{dy,dx,c} in[y+dy-r][x+dx-r][c] * w[dy][dx][c][o]
std::vector<double> naive_conv2d(const Tensor& in, const Tensor& w, const Tensor& b) {
  const std::size_t h = in.dim(0), wd = in.dim(1), c = in.dim(2);
  const std::size_t k = w.dim(0), o = w.dim(3);
  const long r = static_cast<long>(k / 2);
  std::vector<double> out(h * wd * o);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < wd; ++x) {
      for (std::size_t oc = 0; oc < o; ++oc) {
        double s = b.at(oc);
        for (std::size_t dy = 0; dy < k; ++dy) {
          for (std::size_t dx = 0; dx < k; ++dx) {
            const long yy = static_cast<long>(y + dy) - r, xx = static_cast<long>(x + dx) - r;
            if (yy < 0 || xx < 0 || yy >= static_cast<long>(h) || xx >= static_cast<long>(wd)) continue;
            for (std::size_t ic = 0; ic < c; ++ic) {
              s += in.at((yy * wd + xx) * c + ic) * w.at(((dy * k + dx) * c + ic) * o + oc);
            }
          }
        }
        out[(y * wd + x) * o + oc] = s;
      }
    }
  }
  return out;
}

std::vector<double> naive_conv1d(const Tensor& in, const Tensor& w, const Tensor& b) {
  const std::size_t t = in.dim(0), c = in.dim(1), k = w.dim(0), o = w.dim(2);
  const long r = static_cast<long>(k / 2);
  std::vector<double> out(t * o);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t oc = 0; oc < o; ++oc) {
      double s = b.at(oc);
      for (std::size_t d = 0; d < k; ++d) {
        const long ii = static_cast<long>(i + d) - r;
        if (ii < 0 || ii >= static_cast<long>(t)) continue;
        for (std::size_t ic = 0; ic < c; ++ic) s += in.at(ii * c + ic) * w.at((d * c + ic) * o + oc);
      }
      out[i * o + oc] = s;
    }
  }
  return out;
}

void check_close(std::span<const double> got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

}  // namespace

TEST_CASE("elementwise arithmetic") {
  Tensor a(Shape{3}, std::vector<double>{1, 2, 3});
  Tensor b(Shape{3}, std::vector<double>{4, -5, 6});
  check_close((a + b).values(), {5, -3, 9}, 0.0);
  check_close((a - b).values(), {-3, 7, -3}, 0.0);
  check_close((a * b).values(), {4, -10, 18}, 0.0);
  check_close((a + 1.0).values(), {2, 3, 4}, 0.0);
  CHECK(dot(a, b).item() == 12.0);
  CHECK(mean(a).item() == 2.0);
  const Tensor terms[] = {a, b, a};
  check_close(add_n(terms).values(), {6, -1, 12}, 0.0);
  CHECK_THROWS_AS(a + Tensor(Shape{2}, 0.0), std::invalid_argument);
}

TEST_CASE("matmul matches a triple loop") {
  std::mt19937_64 gen(1);
  Tensor a = testing::random_tensor({3, 5}, gen);
  Tensor b = testing::random_tensor({5, 4}, gen);
  Tensor bt = testing::random_tensor({4, 5}, gen);
  std::vector<double> want(12), want_t(12);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t k = 0; k < 5; ++k) {
        want[i * 4 + j] += a.at(i * 5 + k) * b.at(k * 4 + j);
        want_t[i * 4 + j] += a.at(i * 5 + k) * bt.at(j * 5 + k);
      }
    }
  }
  check_close(matmul(a, b).values(), want, 1e-12);
  check_close(matmul(a, bt, true).values(), want_t, 1e-12);
  CHECK_THROWS_AS(matmul(a, a), std::invalid_argument);
}

TEST_CASE("max_reduce routes to the first maximum") {
  Tensor x(Shape{2, 3}, std::vector<double>{1, 4, 4, 7, 2, 7}, true);
  Tensor rows = max_reduce(x, 1);
  check_close(rows.values(), {4, 7}, 0.0);
  backward(sum(rows));
  check_close(x.grad(), {0, 1, 0, 1, 0, 0}, 0.0);
  x.zero_grad();
  Tensor cols = max_reduce(x, 0);
  check_close(cols.values(), {7, 4, 7}, 0.0);
  backward(sum(cols));
  check_close(x.grad(), {0, 1, 0, 1, 0, 1}, 0.0);
  CHECK_THROWS(max_reduce(x, 2));
}

TEST_CASE("normalize_rows gives unit rows and keeps zero rows") {
  Tensor x(Shape{2, 2}, std::vector<double>{3, 4, 0, 0});
  check_close(normalize_rows(x).values(), {0.6, 0.8, 0, 0}, 1e-15);
}

TEST_CASE("gather_rows accumulates repeated rows") {
  Tensor table(Shape{3, 2}, std::vector<double>{1, 2, 3, 4, 5, 6}, true);
  const std::size_t ids[] = {2, 0, 2};
  Tensor g = gather_rows(table, ids);
  check_close(g.values(), {5, 6, 1, 2, 5, 6}, 0.0);
  backward(sum(g));
  check_close(table.grad(), {1, 1, 0, 0, 2, 2}, 0.0);
  const std::size_t bad[] = {3};
  CHECK_THROWS(gather_rows(table, bad));
}

TEST_CASE("reshape keeps values") {
  Tensor x(Shape{2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(reshape(x, {3, 2}).shape() == Shape{3, 2});
  CHECK_THROWS_AS(reshape(x, {4, 2}), std::invalid_argument);
}

TEST_CASE("conv2d matches a direct convolution") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 gen(seed);
    Tensor x = testing::random_tensor({5, 7, 3}, gen);
    Tensor w = testing::random_tensor({3, 3, 3, 4}, gen);
    Tensor b = testing::random_tensor({4}, gen);
    check_close(conv2d(x, w, b).values(), naive_conv2d(x, w, b), 1e-12);
    Tensor w1 = testing::random_tensor({1, 1, 3, 2}, gen);
    Tensor b1 = testing::random_tensor({2}, gen);
    check_close(conv2d(x, w1, b1).values(), naive_conv2d(x, w1, b1), 1e-12);
  }
  Tensor x(Shape{4, 4, 2}, 1.0);
  CHECK_THROWS(conv2d(x, Tensor(Shape{3, 3, 3, 1}, 0.0), Tensor(Shape{1}, 0.0)));
  CHECK_THROWS(conv2d(x, Tensor(Shape{2, 2, 2, 1}, 0.0), Tensor(Shape{1}, 0.0)));
}

TEST_CASE("conv1d matches a direct convolution") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 gen(seed);
    Tensor x = testing::random_tensor({9, 4}, gen);
    Tensor w = testing::random_tensor({5, 4, 3}, gen);
    Tensor b = testing::random_tensor({3}, gen);
    check_close(conv1d(x, w, b).values(), naive_conv1d(x, w, b), 1e-12);
  }
}

TEST_CASE("max pooling") {
  Tensor x(Shape{2, 5, 1}, std::vector<double>{1, 5, 2, 0, 9, 3, 4, 8, 8, 9});
  Tensor p = maxpool2d(x);
  CHECK(p.shape() == Shape{1, 2, 1});
  check_close(p.values(), {5, 8}, 0.0);
  Tensor s(Shape{5, 2}, std::vector<double>{1, 0, 3, -1, 2, 2, 2, 5, 7, 7});
  Tensor q = maxpool1d(s);
  CHECK(q.shape() == Shape{2, 2});
  check_close(q.values(), {3, 0, 2, 5}, 0.0);
  CHECK_THROWS(maxpool1d(Tensor(Shape{1, 2}, 0.0)));
}
