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

// Data-parallel inner loops. Every table entry has a scalar reference
// implementation; SIMD variants must produce bit-identical results, which
// holds because all of them accumulate in the same order, use only IEEE
// correctly-rounded operations (add, mul, div, sqrt, max) and never fuse
// multiply-add.

namespace tks::kernels {

enum class Isa { kScalar, kAvx2, kNeon };

enum class SurrogateKind { kRectangular, kTriangular, kPiecewiseQuadratic };

struct LifCoeffs {
  float leak;     // 1 - 1/tau_m
  float inv_tau;  // 1/tau_m
  float v_rest;
};

struct AdamCoeffs {
  float decay;        // multiplicative decoupled weight decay, 1 - lr * wd
  float beta1;
  float one_minus_beta1;
  float beta2;
  float one_minus_beta2;
  float step_size;    // lr / (1 - beta1^t)
  float sqrt_bias2;   // sqrt(1 - beta2^t)
  float eps;
};

struct KernelTable {
  Isa isa;
  const char* name;

  // c[m x n] = a[m x k] * b[k x n], row-major. Zero entries of a are skipped.
  void (*gemm)(std::size_t m, std::size_t n, std::size_t k, const float* a,
               const float* b, float* c);
  void (*add)(std::size_t n, const float* a, const float* b, float* out);
  void (*mul)(std::size_t n, const float* a, const float* b, float* out);
  void (*scale)(std::size_t n, const float* a, float s, float* out);
  // dst += src
  void (*accumulate)(std::size_t n, const float* src, float* dst);
  // out = v >= threshold ? 1 : 0
  void (*heaviside)(std::size_t n, const float* v, float threshold, float* out);
  // out = g * surrogate'(v - threshold)
  void (*surrogate_grad)(std::size_t n, const float* v, float threshold,
                         SurrogateKind kind, float width, const float* g,
                         float* out);
  // out = leak * (v_rest * s + v * (1 - s)) + inv_tau * current
  void (*lif_forward)(std::size_t n, const float* v, const float* s,
                      const float* current, LifCoeffs c, float* out);
  // dv = (g*leak)*(1-s); ds = (g*leak)*(v_rest-v) when ds != nullptr;
  // dcurrent = g*inv_tau. Outputs are overwritten.
  void (*lif_backward)(std::size_t n, const float* g, const float* v,
                       const float* s, LifCoeffs c, float* dv, float* ds,
                       float* dcurrent);
  void (*adam)(std::size_t n, float* p, const float* g, float* m, float* v,
               AdamCoeffs c);
};

const KernelTable& scalar_table();

// Every table usable on this machine, scalar first.
std::span<const KernelTable* const> available_tables();

// Table used by the ops. Chosen once: the best available ISA unless the
// TKS_KERNELS environment variable names another one ("scalar", "avx2",
// "neon").
const KernelTable& active();

// Force a specific table; returns false if it is not available here.
bool set_active(Isa isa);

}  // namespace tks::kernels
