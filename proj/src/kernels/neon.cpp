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

#include <arm_neon.h>

#include <cmath>

#include "kernels_impl.hpp"
#include "tks/kernels.hpp"

// AArch64 variant. Same operation order as the scalar reference and no
// vfmaq, so lanes round exactly like the scalar loop.

namespace tks::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void Gemm(std::size_t m, std::size_t n, std::size_t k, const float* a,
          const float* b, float* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const float* arow = a + i * k;
    float* crow = c + i * n;
    std::size_t j = 0;
    for (; j + 4 * kLanes <= n; j += 4 * kLanes) {
      float32x4_t c0 = vdupq_n_f32(0.0f);
      float32x4_t c1 = vdupq_n_f32(0.0f);
      float32x4_t c2 = vdupq_n_f32(0.0f);
      float32x4_t c3 = vdupq_n_f32(0.0f);
      for (std::size_t kk = 0; kk < k; ++kk) {
        const float aik = arow[kk];
        if (aik == 0.0f) continue;
        const float32x4_t av = vdupq_n_f32(aik);
        const float* brow = b + kk * n + j;
        c0 = vaddq_f32(c0, vmulq_f32(av, vld1q_f32(brow)));
        c1 = vaddq_f32(c1, vmulq_f32(av, vld1q_f32(brow + 4)));
        c2 = vaddq_f32(c2, vmulq_f32(av, vld1q_f32(brow + 8)));
        c3 = vaddq_f32(c3, vmulq_f32(av, vld1q_f32(brow + 12)));
      }
      vst1q_f32(crow + j, c0);
      vst1q_f32(crow + j + 4, c1);
      vst1q_f32(crow + j + 8, c2);
      vst1q_f32(crow + j + 12, c3);
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
    vst1q_f32(out + i, vaddq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void Mul(std::size_t n, const float* a, const float* b, float* out) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f32(out + i, vmulq_f32(vld1q_f32(a + i), vld1q_f32(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void Scale(std::size_t n, const float* a, float s, float* out) {
  const float32x4_t sv = vdupq_n_f32(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f32(out + i, vmulq_f32(vld1q_f32(a + i), sv));
  }
  for (; i < n; ++i) out[i] = a[i] * s;
}

void Accumulate(std::size_t n, const float* src, float* dst) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    vst1q_f32(dst + i, vaddq_f32(vld1q_f32(dst + i), vld1q_f32(src + i)));
  }
  for (; i < n; ++i) dst[i] += src[i];
}

void Heaviside(std::size_t n, const float* v, float threshold, float* out) {
  const float32x4_t th = vdupq_n_f32(threshold);
  const uint32x4_t one = vreinterpretq_u32_f32(vdupq_n_f32(1.0f));
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const uint32x4_t mask = vcgeq_f32(vld1q_f32(v + i), th);
    vst1q_f32(out + i, vreinterpretq_f32_u32(vandq_u32(mask, one)));
  }
  for (; i < n; ++i) out[i] = v[i] >= threshold ? 1.0f : 0.0f;
}

void SurrogateGrad(std::size_t n, const float* v, float threshold,
                   SurrogateKind kind, float width, const float* g,
                   float* out) {
  const float32x4_t th = vdupq_n_f32(threshold);
  const float32x4_t w = vdupq_n_f32(width);
  const float32x4_t one = vdupq_n_f32(1.0f);
  const float32x4_t zero = vdupq_n_f32(0.0f);
  const float32x4_t inv_w = vdupq_n_f32(1.0f / width);
  const float32x4_t two_inv_w = vdupq_n_f32(2.0f / width);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t ax = vabsq_f32(vsubq_f32(vld1q_f32(v + i), th));
    float32x4_t d;
    switch (kind) {
      case SurrogateKind::kRectangular:
        d = vreinterpretq_f32_u32(vandq_u32(vcltq_f32(ax, w),
                                            vreinterpretq_u32_f32(inv_w)));
        break;
      case SurrogateKind::kTriangular: {
        const float32x4_t r = vmulq_f32(inv_w, vsubq_f32(one, vdivq_f32(ax, w)));
        d = vbslq_f32(vcltq_f32(r, zero), zero, r);
        break;
      }
      case SurrogateKind::kPiecewiseQuadratic:
      default: {
        const float32x4_t r =
            vmulq_f32(two_inv_w, vsubq_f32(one, vdivq_f32(ax, w)));
        d = vbslq_f32(vcltq_f32(r, zero), zero, r);
        break;
      }
    }
    vst1q_f32(out + i, vmulq_f32(vld1q_f32(g + i), d));
  }
  for (; i < n; ++i) {
    out[i] = g[i] * ScalarSurrogate(v[i] - threshold, kind, width);
  }
}

void LifForward(std::size_t n, const float* v, const float* s,
                const float* current, LifCoeffs c, float* out) {
  const float32x4_t leak = vdupq_n_f32(c.leak);
  const float32x4_t inv_tau = vdupq_n_f32(c.inv_tau);
  const float32x4_t v_rest = vdupq_n_f32(c.v_rest);
  const float32x4_t one = vdupq_n_f32(1.0f);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t sv = vld1q_f32(s + i);
    const float32x4_t carry =
        vaddq_f32(vmulq_f32(v_rest, sv),
                  vmulq_f32(vld1q_f32(v + i), vsubq_f32(one, sv)));
    vst1q_f32(out + i, vaddq_f32(vmulq_f32(leak, carry),
                                 vmulq_f32(inv_tau, vld1q_f32(current + i))));
  }
  for (; i < n; ++i) {
    const float carry = c.v_rest * s[i] + v[i] * (1.0f - s[i]);
    out[i] = c.leak * carry + c.inv_tau * current[i];
  }
}

void LifBackward(std::size_t n, const float* g, const float* v, const float* s,
                 LifCoeffs c, float* dv, float* ds, float* dcurrent) {
  const float32x4_t leak = vdupq_n_f32(c.leak);
  const float32x4_t inv_tau = vdupq_n_f32(c.inv_tau);
  const float32x4_t v_rest = vdupq_n_f32(c.v_rest);
  const float32x4_t one = vdupq_n_f32(1.0f);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t gv = vld1q_f32(g + i);
    const float32x4_t gl = vmulq_f32(gv, leak);
    vst1q_f32(dv + i, vmulq_f32(gl, vsubq_f32(one, vld1q_f32(s + i))));
    if (ds != nullptr) {
      vst1q_f32(ds + i, vmulq_f32(gl, vsubq_f32(v_rest, vld1q_f32(v + i))));
    }
    vst1q_f32(dcurrent + i, vmulq_f32(gv, inv_tau));
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
  const float32x4_t decay = vdupq_n_f32(c.decay);
  const float32x4_t b1 = vdupq_n_f32(c.beta1);
  const float32x4_t omb1 = vdupq_n_f32(c.one_minus_beta1);
  const float32x4_t b2 = vdupq_n_f32(c.beta2);
  const float32x4_t omb2 = vdupq_n_f32(c.one_minus_beta2);
  const float32x4_t step = vdupq_n_f32(c.step_size);
  const float32x4_t sqb2 = vdupq_n_f32(c.sqrt_bias2);
  const float32x4_t eps = vdupq_n_f32(c.eps);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float32x4_t gv = vld1q_f32(g + i);
    const float32x4_t decayed = vmulq_f32(vld1q_f32(p + i), decay);
    const float32x4_t mi =
        vaddq_f32(vmulq_f32(b1, vld1q_f32(m + i)), vmulq_f32(omb1, gv));
    const float32x4_t vi = vaddq_f32(vmulq_f32(b2, vld1q_f32(v + i)),
                                     vmulq_f32(omb2, vmulq_f32(gv, gv)));
    vst1q_f32(m + i, mi);
    vst1q_f32(v + i, vi);
    const float32x4_t denom = vaddq_f32(vdivq_f32(vsqrtq_f32(vi), sqb2), eps);
    vst1q_f32(p + i, vsubq_f32(decayed, vmulq_f32(step, vdivq_f32(mi, denom))));
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

const KernelTable& neon_table() {
  static const KernelTable table{
      Isa::kNeon,  "neon",    Gemm,          Add,        Mul,         Scale,
      Accumulate, Heaviside, SurrogateGrad, LifForward, LifBackward, Adam};
  return table;
}

}  // namespace tks::kernels
