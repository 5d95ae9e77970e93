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

#include <algorithm>
#include <cmath>
#include <cstring>

#include "kernels_impl.hpp"
#include "tks/kernels.hpp"

namespace tks::kernels {
namespace {

void Gemm(std::size_t m, std::size_t n, std::size_t k, const float* a,
          const float* b, float* c) {
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = c + i * n;
    std::fill(crow, crow + n, 0.0f);
    const float* arow = a + i * k;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const float aik = arow[kk];
      if (aik == 0.0f) continue;
      const float* brow = b + kk * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
}

void Add(std::size_t n, const float* a, const float* b, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void Mul(std::size_t n, const float* a, const float* b, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void Scale(std::size_t n, const float* a, float s, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * s;
}

void Accumulate(std::size_t n, const float* src, float* dst) {
  for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
}

void Heaviside(std::size_t n, const float* v, float threshold, float* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = v[i] >= threshold ? 1.0f : 0.0f;
}

void SurrogateGrad(std::size_t n, const float* v, float threshold,
                   SurrogateKind kind, float width, const float* g,
                   float* out) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = g[i] * ScalarSurrogate(v[i] - threshold, kind, width);
  }
}

void LifForward(std::size_t n, const float* v, const float* s,
                const float* current, LifCoeffs c, float* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const float carry = c.v_rest * s[i] + v[i] * (1.0f - s[i]);
    out[i] = c.leak * carry + c.inv_tau * current[i];
  }
}

void LifBackward(std::size_t n, const float* g, const float* v, const float* s,
                 LifCoeffs c, float* dv, float* ds, float* dcurrent) {
  for (std::size_t i = 0; i < n; ++i) {
    const float gl = g[i] * c.leak;
    dv[i] = gl * (1.0f - s[i]);
    if (ds != nullptr) ds[i] = gl * (c.v_rest - v[i]);
    dcurrent[i] = g[i] * c.inv_tau;
  }
}

void Adam(std::size_t n, float* p, const float* g, float* m, float* v,
          AdamCoeffs c) {
  for (std::size_t i = 0; i < n; ++i) {
    const float decayed = p[i] * c.decay;
    const float mi = c.beta1 * m[i] + c.one_minus_beta1 * g[i];
    const float vi = c.beta2 * v[i] + c.one_minus_beta2 * (g[i] * g[i]);
    m[i] = mi;
    v[i] = vi;
    const float denom = std::sqrt(vi) / c.sqrt_bias2 + c.eps;
    p[i] = decayed - c.step_size * (mi / denom);
  }
}

}  // namespace

float ScalarSurrogate(float x, SurrogateKind kind, float width) {
  const float ax = std::fabs(x);
  switch (kind) {
    case SurrogateKind::kRectangular:
      return ax < width ? 1.0f / width : 0.0f;
    case SurrogateKind::kTriangular:
      return std::max((1.0f / width) * (1.0f - ax / width), 0.0f);
    case SurrogateKind::kPiecewiseQuadratic:
      return std::max((2.0f / width) * (1.0f - ax / width), 0.0f);
  }
  return 0.0f;
}

const KernelTable& scalar_table() {
  static const KernelTable table{
      Isa::kScalar, "scalar",   Gemm,       Add,         Mul,  Scale,
      Accumulate,   Heaviside, SurrogateGrad, LifForward, LifBackward, Adam};
  return table;
}

}  // namespace tks::kernels
