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

#include "trimodal/ops.h"

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trimodal {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

MapC as_mat(std::span<const double> v, std::size_t rows, std::size_t cols) {
  return MapC(v.data(), static_cast<Eigen::Index>(rows),
              static_cast<Eigen::Index>(cols));
}

Map as_mat(std::span<double> v, std::size_t rows, std::size_t cols) {
  return Map(v.data(), static_cast<Eigen::Index>(rows),
             static_cast<Eigen::Index>(cols));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_str(a.shape()) + " vs " + shape_str(b.shape()));
  }
}

void require_rank(const Tensor& a, std::size_t rank, const char* op) {
  if (a.rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": expected rank " +
                                std::to_string(rank) + ", got shape " +
                                shape_str(a.shape()));
  }
}

void accumulate(std::span<double> dst, std::span<const double> src, double c = 1.0) {
  if (dst.empty()) return;
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += c * src[i];
}

std::vector<std::uint32_t> pack_bits(const std::vector<bool>& bits) {
  std::vector<std::uint32_t> packed((bits.size() + 31) / 32, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) packed[i / 32] |= 1u << (i % 32);
  }
  return packed;
}

Tensor rectify(const Tensor& a, const char* op) {
  const auto x = a.values();
  std::vector<double> out(x.size());
  std::vector<bool> active(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    active[i] = x[i] > 0.0;
    out[i] = active[i] ? x[i] : 0.0;
  }
  auto decisions = pack_bits(active);
  return detail::make_result(
      a.shape(), std::move(out), {&a}, op,
      [](detail::Node& self) {
        auto ga = detail::parent_grad(self, 0);
        if (ga.empty()) return;
        for (std::size_t i = 0; i < ga.size(); ++i) {
          if (self.decisions[i / 32] >> (i % 32) & 1u) ga[i] += self.grad[i];
        }
      },
      std::move(decisions));
}

// Row-major patch matrix for a 'same'-padded k x k window over [h,w,c].
std::vector<double> im2col_2d(std::span<const double> x, std::size_t h,
                              std::size_t w, std::size_t c, std::size_t k) {
  const std::size_t patch = k * k * c;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  std::vector<double> cols(h * w * patch, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t q = 0; q < w; ++q) {
      double* row = &cols[(r * w + q) * patch];
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(r + ky) - pad;
        if (y < 0 || y >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::ptrdiff_t xx = static_cast<std::ptrdiff_t>(q + kx) - pad;
          if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(w)) continue;
          const double* src = &x[(static_cast<std::size_t>(y) * w +
                                  static_cast<std::size_t>(xx)) * c];
          std::copy(src, src + c, row + (ky * k + kx) * c);
        }
      }
    }
  }
  return cols;
}

void col2im_2d(std::span<const double> cols, std::span<double> dx, std::size_t h,
               std::size_t w, std::size_t c, std::size_t k) {
  const std::size_t patch = k * k * c;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t q = 0; q < w; ++q) {
      const double* row = &cols[(r * w + q) * patch];
      for (std::size_t ky = 0; ky < k; ++ky) {
        const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(r + ky) - pad;
        if (y < 0 || y >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t kx = 0; kx < k; ++kx) {
          const std::ptrdiff_t xx = static_cast<std::ptrdiff_t>(q + kx) - pad;
          if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(w)) continue;
          double* dst = &dx[(static_cast<std::size_t>(y) * w +
                             static_cast<std::size_t>(xx)) * c];
          const double* src = row + (ky * k + kx) * c;
          for (std::size_t ch = 0; ch < c; ++ch) dst[ch] += src[ch];
        }
      }
    }
  }
}

std::vector<double> im2col_1d(std::span<const double> x, std::size_t t,
                              std::size_t c, std::size_t k) {
  const std::size_t patch = k * c;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  std::vector<double> cols(t * patch, 0.0);
  for (std::size_t p = 0; p < t; ++p) {
    for (std::size_t kt = 0; kt < k; ++kt) {
      const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(p + kt) - pad;
      if (s < 0 || s >= static_cast<std::ptrdiff_t>(t)) continue;
      const double* src = &x[static_cast<std::size_t>(s) * c];
      std::copy(src, src + c, &cols[p * patch + kt * c]);
    }
  }
  return cols;
}

void col2im_1d(std::span<const double> cols, std::span<double> dx, std::size_t t,
               std::size_t c, std::size_t k) {
  const std::size_t patch = k * c;
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  for (std::size_t p = 0; p < t; ++p) {
    for (std::size_t kt = 0; kt < k; ++kt) {
      const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(p + kt) - pad;
      if (s < 0 || s >= static_cast<std::ptrdiff_t>(t)) continue;
      double* dst = &dx[static_cast<std::size_t>(s) * c];
      const double* src = &cols[p * patch + kt * c];
      for (std::size_t ch = 0; ch < c; ++ch) dst[ch] += src[ch];
    }
  }
}

// Shared tail of conv2d/conv1d: out = cols * W + b over `positions` rows.
Tensor conv_from_cols(const Tensor& x, const Tensor& weight, const Tensor& bias,
                      std::vector<double> cols, std::size_t positions,
                      std::size_t patch, std::size_t out_ch, Shape out_shape,
                      std::function<void(std::span<const double>, std::span<double>)>
                          scatter,
                      const char* op) {
  std::vector<double> out(positions * out_ch);
  auto y = as_mat(std::span<double>(out), positions, out_ch);
  y.noalias() = as_mat(std::span<const double>(cols), positions, patch) *
                as_mat(weight.values(), patch, out_ch);
  const auto b = bias.values();
  for (std::size_t p = 0; p < positions; ++p) {
    for (std::size_t o = 0; o < out_ch; ++o) out[p * out_ch + o] += b[o];
  }
  return detail::make_result(
      std::move(out_shape), std::move(out), {&x, &weight, &bias}, op,
      [cols = std::move(cols), positions, patch, out_ch,
       scatter = std::move(scatter)](detail::Node& self) {
        const auto dy = as_mat(std::span<const double>(self.grad), positions, out_ch);
        auto gw = detail::parent_grad(self, 1);
        if (!gw.empty()) {
          as_mat(gw, patch, out_ch).noalias() +=
              as_mat(std::span<const double>(cols), positions, patch).transpose() * dy;
        }
        auto gb = detail::parent_grad(self, 2);
        if (!gb.empty()) {
          for (std::size_t p = 0; p < positions; ++p) {
            for (std::size_t o = 0; o < out_ch; ++o) gb[o] += self.grad[p * out_ch + o];
          }
        }
        auto gx = detail::parent_grad(self, 0);
        if (!gx.empty()) {
          std::vector<double> dcols(positions * patch);
          as_mat(std::span<double>(dcols), positions, patch).noalias() =
              dy * as_mat(detail::parent_value(self, 1), patch, out_ch).transpose();
          scatter(dcols, gx);
        }
      });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) + b.at(i);
  return detail::make_result(a.shape(), std::move(out), {&a, &b}, "add",
                             [](detail::Node& self) {
                               accumulate(detail::parent_grad(self, 0), self.grad);
                               accumulate(detail::parent_grad(self, 1), self.grad);
                             });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) - b.at(i);
  return detail::make_result(a.shape(), std::move(out), {&a, &b}, "sub",
                             [](detail::Node& self) {
                               accumulate(detail::parent_grad(self, 0), self.grad);
                               accumulate(detail::parent_grad(self, 1), self.grad, -1.0);
                             });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i) * b.at(i);
  return detail::make_result(
      a.shape(), std::move(out), {&a, &b}, "mul", [](detail::Node& self) {
        auto ga = detail::parent_grad(self, 0);
        auto gb = detail::parent_grad(self, 1);
        const auto va = detail::parent_value(self, 0);
        const auto vb = detail::parent_value(self, 1);
        for (std::size_t i = 0; i < self.grad.size(); ++i) {
          if (!ga.empty()) ga[i] += self.grad[i] * vb[i];
          if (!gb.empty()) gb[i] += self.grad[i] * va[i];
        }
      });
}

Tensor scale(const Tensor& a, double c) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v *= c;
  return detail::make_result(a.shape(), std::move(out), {&a}, "scale",
                             [c](detail::Node& self) {
                               accumulate(detail::parent_grad(self, 0), self.grad, c);
                             });
}

Tensor add_scalar(const Tensor& a, double c) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& v : out) v += c;
  return detail::make_result(a.shape(), std::move(out), {&a}, "add_scalar",
                             [](detail::Node& self) {
                               accumulate(detail::parent_grad(self, 0), self.grad);
                             });
}

Tensor add_n(std::span<const Tensor> terms) {
  if (terms.empty()) throw std::invalid_argument("add_n: no terms");
  std::vector<double> out(terms[0].values().begin(), terms[0].values().end());
  for (std::size_t t = 1; t < terms.size(); ++t) {
    require_same_shape(terms[0], terms[t], "add_n");
    const auto v = terms[t].values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
  }
  return detail::make_result(terms[0].shape(), std::move(out),
                             std::vector<Tensor>(terms.begin(), terms.end()), "add_n",
                             [](detail::Node& self) {
                               for (std::size_t p = 0; p < self.parents.size(); ++p) {
                                 accumulate(detail::parent_grad(self, p), self.grad);
                               }
                             });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v;
  return detail::make_result(Shape{1}, {s}, {&a}, "sum", [](detail::Node& self) {
    auto ga = detail::parent_grad(self, 0);
    for (double& g : ga) g += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  const double n = static_cast<double>(a.numel());
  double s = 0.0;
  for (double v : a.values()) s += v;
  return detail::make_result(Shape{1}, {s / n}, {&a}, "mean",
                             [n](detail::Node& self) {
                               auto ga = detail::parent_grad(self, 0);
                               for (double& g : ga) g += self.grad[0] / n;
                             });
}

Tensor dot(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) s += a.at(i) * b.at(i);
  return detail::make_result(Shape{1}, {s}, {&a, &b}, "dot", [](detail::Node& self) {
    accumulate(detail::parent_grad(self, 0), detail::parent_value(self, 1), self.grad[0]);
    accumulate(detail::parent_grad(self, 1), detail::parent_value(self, 0), self.grad[0]);
  });
}

Tensor relu(const Tensor& a) { return rectify(a, "relu"); }
Tensor hinge(const Tensor& a) { return rectify(a, "hinge"); }

Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.dim(0);
  const std::size_t k = a.dim(1);
  const std::size_t bk = transpose_b ? b.dim(1) : b.dim(0);
  const std::size_t n = transpose_b ? b.dim(0) : b.dim(1);
  if (k != bk) {
    throw std::invalid_argument("matmul: inner dimensions differ " + shape_str(a.shape()) +
                                (transpose_b ? " x T" : " x ") + shape_str(b.shape()));
  }
  std::vector<double> out(m * n);
  auto c = as_mat(std::span<double>(out), m, n);
  if (transpose_b) {
    c.noalias() = as_mat(a.values(), m, k) * as_mat(b.values(), n, k).transpose();
  } else {
    c.noalias() = as_mat(a.values(), m, k) * as_mat(b.values(), k, n);
  }
  return detail::make_result(
      Shape{m, n}, std::move(out), {&a, &b}, "matmul",
      [m, k, n, transpose_b](detail::Node& self) {
        const auto dc = as_mat(std::span<const double>(self.grad), m, n);
        const auto va = as_mat(detail::parent_value(self, 0), m, k);
        auto ga = detail::parent_grad(self, 0);
        auto gb = detail::parent_grad(self, 1);
        if (transpose_b) {
          const auto vb = as_mat(detail::parent_value(self, 1), n, k);
          if (!ga.empty()) as_mat(ga, m, k).noalias() += dc * vb;
          if (!gb.empty()) as_mat(gb, n, k).noalias() += dc.transpose() * va;
        } else {
          const auto vb = as_mat(detail::parent_value(self, 1), k, n);
          if (!ga.empty()) as_mat(ga, m, k).noalias() += dc * vb.transpose();
          if (!gb.empty()) as_mat(gb, k, n).noalias() += va.transpose() * dc;
        }
      });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw std::invalid_argument("reshape: cannot view " + shape_str(a.shape()) +
                                " as " + shape_str(shape));
  }
  std::vector<double> out(a.values().begin(), a.values().end());
  return detail::make_result(std::move(shape), std::move(out), {&a}, "reshape",
                             [](detail::Node& self) {
                               accumulate(detail::parent_grad(self, 0), self.grad);
                             });
}

Tensor max_reduce(const Tensor& a, std::size_t axis) {
  require_rank(a, 2, "max_reduce");
  if (axis > 1) throw std::invalid_argument("max_reduce: axis must be 0 or 1");
  const std::size_t rows = a.dim(0);
  const std::size_t cols = a.dim(1);
  const auto x = a.values();
  const std::size_t outer = axis == 1 ? rows : cols;
  const std::size_t inner = axis == 1 ? cols : rows;
  std::vector<double> out(outer);
  std::vector<std::uint32_t> argmax(outer);
  for (std::size_t o = 0; o < outer; ++o) {
    std::size_t best = axis == 1 ? o * cols : o;
    for (std::size_t i = 1; i < inner; ++i) {
      const std::size_t idx = axis == 1 ? o * cols + i : i * cols + o;
      if (x[idx] > x[best]) best = idx;
    }
    out[o] = x[best];
    argmax[o] = static_cast<std::uint32_t>(best);
  }
  return detail::make_result(
      Shape{outer}, std::move(out), {&a}, "max_reduce",
      [](detail::Node& self) {
        auto ga = detail::parent_grad(self, 0);
        if (ga.empty()) return;
        for (std::size_t o = 0; o < self.grad.size(); ++o) {
          ga[self.decisions[o]] += self.grad[o];
        }
      },
      std::move(argmax));
}

Tensor normalize_rows(const Tensor& a) {
  require_rank(a, 2, "normalize_rows");
  const std::size_t n = a.dim(0);
  const std::size_t d = a.dim(1);
  const auto x = a.values();
  std::vector<double> out(n * d, 0.0);
  std::vector<double> norms(n, 0.0);
  std::vector<std::uint32_t> zero_rows(n, 0);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += x[r * d + j] * x[r * d + j];
    norms[r] = std::sqrt(s);
    if (norms[r] == 0.0) {
      zero_rows[r] = 1;
      continue;
    }
    for (std::size_t j = 0; j < d; ++j) out[r * d + j] = x[r * d + j] / norms[r];
  }
  return detail::make_result(
      Shape{n, d}, std::move(out), {&a}, "normalize_rows",
      [n, d, norms = std::move(norms)](detail::Node& self) {
        auto ga = detail::parent_grad(self, 0);
        if (ga.empty()) return;
        const auto& y = self.value;
        for (std::size_t r = 0; r < n; ++r) {
          if (norms[r] == 0.0) continue;
          double proj = 0.0;
          for (std::size_t j = 0; j < d; ++j) proj += y[r * d + j] * self.grad[r * d + j];
          for (std::size_t j = 0; j < d; ++j) {
            ga[r * d + j] += (self.grad[r * d + j] - y[r * d + j] * proj) / norms[r];
          }
        }
      },
      std::move(zero_rows));
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> ids) {
  require_rank(table, 2, "gather_rows");
  if (ids.empty()) throw std::invalid_argument("gather_rows: empty id list");
  const std::size_t v = table.dim(0);
  const std::size_t d = table.dim(1);
  std::vector<double> out(ids.size() * d);
  for (std::size_t w = 0; w < ids.size(); ++w) {
    if (ids[w] >= v) {
      throw std::out_of_range("gather_rows: id " + std::to_string(ids[w]) +
                              " outside vocabulary of size " + std::to_string(v));
    }
    const auto row = table.values().subspan(ids[w] * d, d);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(w * d));
  }
  return detail::make_result(
      Shape{ids.size(), d}, std::move(out), {&table}, "gather_rows",
      [d, rows = std::vector<std::size_t>(ids.begin(), ids.end())](detail::Node& self) {
        auto gt = detail::parent_grad(self, 0);
        if (gt.empty()) return;
        for (std::size_t w = 0; w < rows.size(); ++w) {
          for (std::size_t j = 0; j < d; ++j) gt[rows[w] * d + j] += self.grad[w * d + j];
        }
      });
}

Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(x, 3, "conv2d");
  require_rank(weight, 4, "conv2d");
  const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
  const std::size_t k = weight.dim(0);
  const std::size_t out_ch = weight.dim(3);
  if (weight.dim(1) != k || k % 2 == 0 || weight.dim(2) != c) {
    throw std::invalid_argument("conv2d: weight " + shape_str(weight.shape()) +
                                " incompatible with input " + shape_str(x.shape()));
  }
  if (bias.shape() != Shape{out_ch}) {
    throw std::invalid_argument("conv2d: bias shape " + shape_str(bias.shape()));
  }
  auto cols = im2col_2d(x.values(), h, w, c, k);
  return conv_from_cols(
      x, weight, bias, std::move(cols), h * w, k * k * c, out_ch, Shape{h, w, out_ch},
      [h, w, c, k](std::span<const double> dcols, std::span<double> dx) {
        col2im_2d(dcols, dx, h, w, c, k);
      },
      "conv2d");
}

Tensor maxpool2d(const Tensor& x) {
  require_rank(x, 3, "maxpool2d");
  const std::size_t h = x.dim(0), w = x.dim(1), c = x.dim(2);
  const std::size_t oh = h / 2, ow = w / 2;
  if (oh == 0 || ow == 0) {
    throw std::invalid_argument("maxpool2d: input " + shape_str(x.shape()) +
                                " smaller than the 2x2 window");
  }
  const auto v = x.values();
  std::vector<double> out(oh * ow * c);
  std::vector<std::uint32_t> argmax(out.size());
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t q = 0; q < ow; ++q) {
      for (std::size_t ch = 0; ch < c; ++ch) {
        std::size_t best = ((2 * r) * w + 2 * q) * c + ch;
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = ((2 * r + dy) * w + 2 * q + dx) * c + ch;
            if (v[idx] > v[best]) best = idx;
          }
        }
        const std::size_t o = (r * ow + q) * c + ch;
        out[o] = v[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
  return detail::make_result(
      Shape{oh, ow, c}, std::move(out), {&x}, "maxpool2d",
      [](detail::Node& self) {
        auto gx = detail::parent_grad(self, 0);
        if (gx.empty()) return;
        for (std::size_t o = 0; o < self.grad.size(); ++o) gx[self.decisions[o]] += self.grad[o];
      },
      std::move(argmax));
}

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(x, 2, "conv1d");
  require_rank(weight, 3, "conv1d");
  const std::size_t t = x.dim(0), c = x.dim(1);
  const std::size_t k = weight.dim(0);
  const std::size_t out_ch = weight.dim(2);
  if (k % 2 == 0 || weight.dim(1) != c) {
    throw std::invalid_argument("conv1d: weight " + shape_str(weight.shape()) +
                                " incompatible with input " + shape_str(x.shape()));
  }
  if (bias.shape() != Shape{out_ch}) {
    throw std::invalid_argument("conv1d: bias shape " + shape_str(bias.shape()));
  }
  auto cols = im2col_1d(x.values(), t, c, k);
  return conv_from_cols(
      x, weight, bias, std::move(cols), t, k * c, out_ch, Shape{t, out_ch},
      [t, c, k](std::span<const double> dcols, std::span<double> dx) {
        col2im_1d(dcols, dx, t, c, k);
      },
      "conv1d");
}

Tensor maxpool1d(const Tensor& x) {
  require_rank(x, 2, "maxpool1d");
  const std::size_t t = x.dim(0), c = x.dim(1);
  const std::size_t ot = t / 2;
  if (ot == 0) {
    throw std::invalid_argument("maxpool1d: sequence of length " + std::to_string(t) +
                                " shorter than the pooling width 2");
  }
  const auto v = x.values();
  std::vector<double> out(ot * c);
  std::vector<std::uint32_t> argmax(out.size());
  for (std::size_t s = 0; s < ot; ++s) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t a = (2 * s) * c + ch;
      const std::size_t b = (2 * s + 1) * c + ch;
      const std::size_t best = v[b] > v[a] ? b : a;
      out[s * c + ch] = v[best];
      argmax[s * c + ch] = static_cast<std::uint32_t>(best);
    }
  }
  return detail::make_result(
      Shape{ot, c}, std::move(out), {&x}, "maxpool1d",
      [](detail::Node& self) {
        auto gx = detail::parent_grad(self, 0);
        if (gx.empty()) return;
        for (std::size_t o = 0; o < self.grad.size(); ++o) gx[self.decisions[o]] += self.grad[o];
      },
      std::move(argmax));
}

}  // namespace trimodal
