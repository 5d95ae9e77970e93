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

#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"
#include "tks/kernels.hpp"

// Compiled with -mavx2 only (no -mfma): every lane performs exactly the
// scalar operation sequence, so results match the reference bit for bit.

namespace tks::kernels {
namespace {

constexpr std::size_t kLanes = 8;

void Gemm(std::size_t m, std::size_t n, std::size_t k, const float* a,
          const float* b, float* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    std::size_t j = 0;
    // 32-column panels stay in registers across the whole k loop.
    for (; j + 4 * kLanes <= n; j += 4 * kLanes) {
      __m256 c0 = _mm256_setzero_ps();
      __m256 c1 = _mm256_setzero_ps();
      __m256 c2 = _mm256_setzero_ps();
      __m256 c3 = _mm256_setzero_ps();
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float aik = arow[kk];
        if (aik == 0.0f) continue;
        const __m256 av = _mm256_set1_ps(aik);
        const float* brow = b + kk * n + j;
        c0 = _mm256_add_ps(c0, _mm256_mul_ps(av, _mm256_loadu_ps(brow)));
        c1 = _mm256_add_ps(c1, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 8)));
        c2 = _mm256_add_ps(c2, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 16)));
        c3 = _mm256_add_ps(c3, _mm256_mul_ps(av, _mm256_loadu_ps(brow + 24)));
      }
      _mm256_storeu_ps(crow + j, c0);
      _mm256_storeu_ps(crow + j + 8, c1);
      _mm256_storeu_ps(crow + j + 16, c2);
      _mm256_storeu_ps(crow + j + 24, c3);
    }
    for (; j + kLanes <= n; j += kLanes) {
      __m256 acc = _mm256_setzero_ps();
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float aik = arow[kk];
        if (aik == 0.0f) continue;
        acc = _mm256_add_ps(
            acc, _mm256_mul_ps(_mm256_set1_ps(aik),
                               _mm256_loadu_ps(b + kk * n + j)));
      }
      _mm256_storeu_ps(crow + j, acc);
    }
    for (; j < n; ++j) {
      float acc = 0.0f;
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float aik = arow[kk];
        if (aik == 0.0f) continue;
        acc += aik * b[kk * n + j];
      }
      crow[j] = acc;
    }
  }
}

void Add(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void Mul(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i),
                                            _mm256_loadu_ps(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void Scale(std::size_t n, const float* a, float s, float* out) {
  const __m256 sv = _mm256_set1_ps(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), sv));
  }
  for (; i < n; ++i) out[i] = a[i] * s;
}

void Accumulate(std::size_t n, const float* src, float* dst) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_ps(dst + i, _mm256_add_ps(_mm256_loadu_ps(dst + i),
                                            _mm256_loadu_ps(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

void Heaviside(std::size_t n, const float* v, float threshold, float* out) {
  const __m256 th = _mm256_set1_ps(threshold);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(v + i), th, _CMP_GE_OQ);
    _mm256_storeu_ps(out + i, _mm256_and_ps(mask, one));
  }
  for (; i < n; ++i) out[i] = v[i] >= threshold ? 1.0f : 0.0f;
}

void SurrogateGrad(std::size_t n, const float* v, float threshold,
                   SurrogateKind kind, float width, const float* g,
                   float* out) {
  const __m256 th = _mm256_set1_ps(threshold);
  const __m256 w = _mm256_set1_ps(width);
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 zero = _mm256_setzero_ps();
  const __m256 abs_mask = _mm256_castsi256_ps(_mm256_set1_epi32(0x7fffffff));
  const __m256 inv_w = _mm256_set1_ps(1.0f / width);
  const __m256 two_inv_w = _mm256_set1_ps(2.0f / width);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 x = _mm256_sub_ps(_mm256_loadu_ps(v + i), th);
    const __m256 ax = _mm256_and_ps(x, abs_mask);
    __m256 d;
    switch (kind) {
      case SurrogateKind::kRectangular:
        d = _mm256_and_ps(_mm256_cmp_ps(ax, w, _CMP_LT_OQ), inv_w);
        break;
      case SurrogateKind::kTriangular:
        d = _mm256_max_ps(
            zero,
            _mm256_mul_ps(inv_w, _mm256_sub_ps(one, _mm256_div_ps(ax, w))));
        break;
      case SurrogateKind::kPiecewiseQuadratic:
      default:
        d = _mm256_max_ps(
            zero, _mm256_mul_ps(two_inv_w,
                                _mm256_sub_ps(one, _mm256_div_ps(ax, w))));
        break;
    }
    _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(g + i), d));
  }
  for (; i < n; ++i) {
    out[i] = g[i] * ScalarSurrogate(v[i] - threshold, kind, width);
  }
}

void LifForward(std::size_t n, const float* v, const float* s,
                const float* current, LifCoeffs c, float* out) {
  const __m256 leak = _mm256_set1_ps(c.leak);
  const __m256 inv_tau = _mm256_set1_ps(c.inv_tau);
  const __m256 v_rest = _mm256_set1_ps(c.v_rest);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 sv = _mm256_loadu_ps(s + i);
    const __m256 carry =
        _mm256_add_ps(_mm256_mul_ps(v_rest, sv),
                      _mm256_mul_ps(_mm256_loadu_ps(v + i),
                                    _mm256_sub_ps(one, sv)));
    _mm256_storeu_ps(
        out + i, _mm256_add_ps(_mm256_mul_ps(leak, carry),
                               _mm256_mul_ps(inv_tau,
                                             _mm256_loadu_ps(current + i))));
  }
  for (; i < n; ++i) {
    const float carry = c.v_rest * s[i] + v[i] * (1.0f - s[i]);
    out[i] = c.leak * carry + c.inv_tau * current[i];
  }
}

void LifBackward(std::size_t n, const float* g, const float* v, const float* s,
                 LifCoeffs c, float* dv, float* ds, float* dcurrent) {
  const __m256 leak = _mm256_set1_ps(c.leak);
  const __m256 inv_tau = _mm256_set1_ps(c.inv_tau);
  const __m256 v_rest = _mm256_set1_ps(c.v_rest);
  const __m256 one = _mm256_set1_ps(1.0f);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 gl = _mm256_mul_ps(gv, leak);
    _mm256_storeu_ps(dv + i,
                     _mm256_mul_ps(gl, _mm256_sub_ps(one, _mm256_loadu_ps(s + i))));
    if (ds != nullptr) {
      _mm256_storeu_ps(
          ds + i, _mm256_mul_ps(gl, _mm256_sub_ps(v_rest, _mm256_loadu_ps(v + i))));
    }
    _mm256_storeu_ps(dcurrent + i, _mm256_mul_ps(gv, inv_tau));
  }
  for (; i < n; ++i) {
    const float gl = g[i] * c.leak;
    dv[i] = gl * (1.0f - s[i]);
    if (ds != nullptr) ds[i] = gl * (c.v_rest - v[i]);
    dcurrent[i] = g[i] * c.inv_tau;
  }
}

void Adam(std::size_t n, float* p, const float* g, float* m, float* v,
          AdamCoeffs c) {
  const __m256 decay = _mm256_set1_ps(c.decay);
  const __m256 b1 = _mm256_set1_ps(c.beta1);
  const __m256 omb1 = _mm256_set1_ps(c.one_minus_beta1);
  const __m256 b2 = _mm256_set1_ps(c.beta2);
  const __m256 omb2 = _mm256_set1_ps(c.one_minus_beta2);
  const __m256 step = _mm256_set1_ps(c.step_size);
  const __m256 sqb2 = _mm256_set1_ps(c.sqrt_bias2);
  const __m256 eps = _mm256_set1_ps(c.eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 gv = _mm256_loadu_ps(g + i);
    const __m256 decayed = _mm256_mul_ps(_mm256_loadu_ps(p + i), decay);
    const __m256 mi = _mm256_add_ps(_mm256_mul_ps(b1, _mm256_loadu_ps(m + i)),
                                    _mm256_mul_ps(omb1, gv));
    const __m256 vi = _mm256_add_ps(_mm256_mul_ps(b2, _mm256_loadu_ps(v + i)),
                                    _mm256_mul_ps(omb2, _mm256_mul_ps(gv, gv)));
    _mm256_storeu_ps(m + i, mi);
    _mm256_storeu_ps(v + i, vi);
    const __m256 denom =
        _mm256_add_ps(_mm256_div_ps(_mm256_sqrt_ps(vi), sqb2), eps);
    _mm256_storeu_ps(p + i, _mm256_sub_ps(decayed,
                                          _mm256_mul_ps(step, _mm256_div_ps(mi, denom))));
  }
  for (; i < n; ++i) {
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

bool avx2_supported() { return __builtin_cpu_supports("avx2"); }

const KernelTable& avx2_table() {
  static const KernelTable table{
      Isa::kAvx2,  "avx2",    Gemm,          Add,        Mul,         Scale,
      Accumulate, Heaviside, SurrogateGrad, LifForward, LifBackward, Adam};
  return table;
}

}  // namespace tks::kernels
