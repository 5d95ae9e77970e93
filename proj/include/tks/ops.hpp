// Copyright 2026 The TKS-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>

#include "tks/kernels.hpp"
#include "tks/surrogate.hpp"
#include "tks/tape.hpp"
#include "tks/tensor.hpp"

// Differentiable operations. Each one computes its result eagerly and, when
// any input tracks gradients, records a backward rule on the tape.
// Reductions run in a fixed order so identical inputs give identical bits.

namespace tks::ops {

// Floor applied inside log(); inputs below it are clamped and get zero
// gradient.
inline constexpr float kLogFloor = 1e-12f;

// [m, k] x [k, n] -> [m, n]
Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
// Elementwise, identical shapes.
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor scale(Tape& tape, const Tensor& a, float s);
// x [rows, n] + bias [n] broadcast over rows.
Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias);
// x [rows, in] * w [in, out] + b [out]
Tensor linear(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b);

// Full reductions to shape [1].
Tensor sum(Tape& tape, const Tensor& a);
Tensor mean(Tape& tape, const Tensor& a);

// log(max(a, kLogFloor))
Tensor log(Tape& tape, const Tensor& a);

// exp(x/tau) / sum exp(x/tau) over the last axis, max-subtracted.
Tensor softmax(Tape& tape, const Tensor& logits, float tau = 1.0f);

// [n, ...] -> [...], mean over the leading axis.
Tensor mean_axis0(Tape& tape, const Tensor& a);
// n tensors of shape S -> [n, S...]
Tensor stack(Tape& tape, std::span<const Tensor> parts);
// a[index] along the leading axis.
Tensor select(Tape& tape, const Tensor& a, std::size_t index);
Tensor reshape(Tape& tape, const Tensor& a, Shape shape);

// Heaviside at v_th on the forward pass (1 where v >= v_th); surrogate
// derivative on the backward pass.
Tensor spike(Tape& tape, const Tensor& v, float v_th,
             const SurrogateSpec& surrogate);

// leak * (v_rest * s_prev + v * (1 - s_prev)) + inv_tau * current.
// With detach_reset the s_prev path receives no gradient.
Tensor lif_update(Tape& tape, const Tensor& v, const Tensor& s_prev,
                  const Tensor& current, kernels::LifCoeffs coeffs,
                  bool detach_reset);

// x [B, C, H, W], w [O, C, K, K], b [O] -> [B, O, Ho, Wo]
Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b,
              std::size_t stride, std::size_t padding);
// Non-overlapping window x window average; trailing rows/cols dropped.
Tensor avg_pool2d(Tape& tape, const Tensor& x, std::size_t window);

// Row-major transpose of a [rows, cols] buffer.
void transpose(std::size_t rows, std::size_t cols, const float* in,
               float* out);

}  // namespace tks::ops
