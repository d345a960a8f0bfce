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

// Differentiable primitives. Every op records a backward function when any
// input requires grad. Max-style reductions route the gradient to the first
// maximal element in scan order.
namespace trimodal {

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double c) { return scale(a, c); }
inline Tensor operator*(double c, const Tensor& a) { return scale(a, c); }
inline Tensor operator+(const Tensor& a, double c) { return add_scalar(a, c); }

// Elementwise sum of equally shaped tensors, accumulated left to right.
Tensor add_n(std::span<const Tensor> terms);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor dot(const Tensor& a, const Tensor& b);

Tensor relu(const Tensor& a);
// max(0, x); identical to relu but named separately in the graph.
Tensor hinge(const Tensor& a);

// [m,k] x [k,n] -> [m,n], or [m,k] x [n,k]^T -> [m,n] when transpose_b.
Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_b = false);

Tensor reshape(const Tensor& a, Shape shape);

// Max over one axis of a rank-2 tensor: axis 1 gives [rows], axis 0 [cols].
Tensor max_reduce(const Tensor& a, std::size_t axis);

// Row-wise L2 normalization of [n,d]; all-zero rows stay zero.
Tensor normalize_rows(const Tensor& a);

// Rows of table [v,d] selected by ids -> [ids.size(), d].
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> ids);

// 'Same'-padded stride-1 convolution over an [h,w,c] image with weights
// [k,k,c,out] (k odd) and bias [out].
Tensor conv2d(const Tensor& x, const Tensor& weight, const Tensor& bias);
// 2x2 stride-2 max pooling of [h,w,c]; odd trailing rows/cols are dropped.
Tensor maxpool2d(const Tensor& x);

// 'Same'-padded stride-1 convolution over a [t,c] sequence with weights
// [k,c,out] (k odd) and bias [out].
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias);
// Width-2 stride-2 max pooling over time of [t,c]; floor(t/2) outputs.
Tensor maxpool1d(const Tensor& x);

}  // namespace trimodal
