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

#include "tks/ops.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tks/error.hpp"

namespace tks::ops {
namespace {

const kernels::KernelTable& K() { return kernels::active(); }

void RequireSameShape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " +
                         shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " differ");
  }
}

void RequireRank(const char* op, const Tensor& a, std::size_t rank) {
  if (a.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " +
                         std::to_string(rank) + ", got shape " +
                         shape_string(a.shape()));
  }
}

// grad(t)[offset, offset + delta.size()) += delta
void AccumulateSlice(Tensor& t, std::size_t offset,
                     std::span<const float> delta) {
  if (!t.tracks_grad()) return;
  std::span<float> g = t.mutable_grad();
  K().accumulate(delta.size(), delta.data(), g.data() + offset);
}

}  // namespace

void transpose(std::size_t rows, std::size_t cols, const float* in,
               float* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = in[r * cols + c];
  }
}

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
  RequireRank("matmul", a, 2);
  RequireRank("matmul", b, 2);
  if (a.dim(1) != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + shape_string(a.shape()) +
                         " by " + shape_string(b.shape()));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  Tensor out = Tensor::zeros({m, n});
  K().gemm(m, n, k, a.data().data(), b.data().data(),
           out.mutable_data().data());
  if (tape.should_record({&a, &b})) {
    tape.record({a, b}, out, [m, k, n](const Tensor& o,
                                       std::vector<Tensor>& in) {
      const float* g = o.grad().data();
      if (in[0].tracks_grad()) {
        // dA = dC * B^T
        std::vector<float> bt(n * k), da(m * k);
        transpose(k, n, in[1].data().data(), bt.data());
        K().gemm(m, k, n, g, bt.data(), da.data());
        accumulate_grad(in[0], da);
      }
      if (in[1].tracks_grad()) {
        // dB = A^T * dC
        std::vector<float> at(k * m), db(k * n);
        transpose(m, k, in[0].data().data(), at.data());
        K().gemm(k, n, m, at.data(), g, db.data());
        accumulate_grad(in[1], db);
      }
    });
  }
  return out;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
  RequireSameShape("add", a, b);
  Tensor out = Tensor::zeros(a.shape());
  K().add(a.numel(), a.data().data(), b.data().data(),
          out.mutable_data().data());
  if (tape.should_record({&a, &b})) {
    tape.record({a, b}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      accumulate_grad(in[0], o.grad());
      accumulate_grad(in[1], o.grad());
    });
  }
  return out;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
  RequireSameShape("sub", a, b);
  Tensor out = Tensor::zeros(a.shape());
  std::span<float> od = out.mutable_data();
  for (std::size_t i = 0; i < od.size(); ++i) od[i] = a.at(i) - b.at(i);
  if (tape.should_record({&a, &b})) {
    tape.record({a, b}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      accumulate_grad(in[0], o.grad());
      if (in[1].tracks_grad()) {
        std::vector<float> neg(o.numel());
        K().scale(neg.size(), o.grad().data(), -1.0f, neg.data());
        accumulate_grad(in[1], neg);
      }
    });
  }
  return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
  RequireSameShape("mul", a, b);
  Tensor out = Tensor::zeros(a.shape());
  K().mul(a.numel(), a.data().data(), b.data().data(),
          out.mutable_data().data());
  if (tape.should_record({&a, &b})) {
    tape.record({a, b}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      std::vector<float> d(o.numel());
      if (in[0].tracks_grad()) {
        K().mul(d.size(), o.grad().data(), in[1].data().data(), d.data());
        accumulate_grad(in[0], d);
      }
      if (in[1].tracks_grad()) {
        K().mul(d.size(), o.grad().data(), in[0].data().data(), d.data());
        accumulate_grad(in[1], d);
      }
    });
  }
  return out;
}

Tensor scale(Tape& tape, const Tensor& a, float s) {
  Tensor out = Tensor::zeros(a.shape());
  K().scale(a.numel(), a.data().data(), s, out.mutable_data().data());
  if (tape.should_record({&a})) {
    tape.record({a}, out, [s](const Tensor& o, std::vector<Tensor>& in) {
      std::vector<float> d(o.numel());
      K().scale(d.size(), o.grad().data(), s, d.data());
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor add_bias(Tape& tape, const Tensor& x, const Tensor& bias) {
  RequireRank("add_bias", x, 2);
  RequireRank("add_bias", bias, 1);
  const std::size_t rows = x.dim(0), n = x.dim(1);
  if (bias.dim(0) != n) {
    throw DimensionError("add_bias: bias " + shape_string(bias.shape()) +
                         " does not match rows of " + shape_string(x.shape()));
  }
  Tensor out = Tensor::zeros(x.shape());
  float* od = out.mutable_data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    K().add(n, x.data().data() + r * n, bias.data().data(), od + r * n);
  }
  if (tape.should_record({&x, &bias})) {
    tape.record({x, bias}, out, [rows, n](const Tensor& o,
                                          std::vector<Tensor>& in) {
      accumulate_grad(in[0], o.grad());
      if (in[1].tracks_grad()) {
        std::vector<float> db(n, 0.0f);
        for (std::size_t r = 0; r < rows; ++r) {
          K().accumulate(n, o.grad().data() + r * n, db.data());
        }
        accumulate_grad(in[1], db);
      }
    });
  }
  return out;
}

Tensor linear(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b) {
  return add_bias(tape, matmul(tape, x, w), b);
}

Tensor sum(Tape& tape, const Tensor& a) {
  double acc = 0.0;
  for (float v : a.data()) acc += v;
  Tensor out = Tensor::scalar(static_cast<float>(acc));
  if (tape.should_record({&a})) {
    tape.record({a}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      std::vector<float> d(in[0].numel(), o.grad()[0]);
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor mean(Tape& tape, const Tensor& a) {
  const std::size_t n = a.numel();
  if (n == 0) throw DimensionError("mean of an empty tensor");
  double acc = 0.0;
  for (float v : a.data()) acc += v;
  Tensor out = Tensor::scalar(static_cast<float>(acc / static_cast<double>(n)));
  if (tape.should_record({&a})) {
    tape.record({a}, out, [n](const Tensor& o, std::vector<Tensor>& in) {
      std::vector<float> d(n, o.grad()[0] / static_cast<float>(n));
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor log(Tape& tape, const Tensor& a) {
  Tensor out = Tensor::zeros(a.shape());
  std::span<float> od = out.mutable_data();
  std::span<const float> ad = a.data();
  for (std::size_t i = 0; i < od.size(); ++i) {
    od[i] = std::log(std::max(ad[i], kLogFloor));
  }
  if (tape.should_record({&a})) {
    tape.record({a}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      std::span<const float> x = in[0].data();
      std::span<const float> g = o.grad();
      std::vector<float> d(x.size());
      for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = x[i] > kLogFloor ? g[i] / x[i] : 0.0f;
      }
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor softmax(Tape& tape, const Tensor& logits, float tau) {
  if (!(tau > 0.0f) || !std::isfinite(tau)) {
    throw ParameterError("softmax temperature must be positive, got " +
                         std::to_string(tau));
  }
  if (logits.rank() == 0 || logits.numel() == 0) {
    throw DimensionError("softmax of an empty tensor");
  }
  const std::size_t c = logits.shape().back();
  const std::size_t rows = logits.numel() / c;
  Tensor out = Tensor::zeros(logits.shape());
  const float* x = logits.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const float* xr = x + r * c;
    float* yr = y + r * c;
    const float mx = *std::max_element(xr, xr + c);
    float total = 0.0f;
    for (std::size_t j = 0; j < c; ++j) {
      yr[j] = std::exp((xr[j] - mx) / tau);
      total += yr[j];
    }
    for (std::size_t j = 0; j < c; ++j) yr[j] /= total;
  }
  if (tape.should_record({&logits})) {
    tape.record({logits}, out, [rows, c, tau](const Tensor& o,
                                              std::vector<Tensor>& in) {
      const float* s = o.data().data();
      const float* g = o.grad().data();
      std::vector<float> d(rows * c);
      for (std::size_t r = 0; r < rows; ++r) {
        float dot = 0.0f;
        for (std::size_t j = 0; j < c; ++j) dot += g[r * c + j] * s[r * c + j];
        for (std::size_t j = 0; j < c; ++j) {
          d[r * c + j] = s[r * c + j] * (g[r * c + j] - dot) / tau;
        }
      }
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor mean_axis0(Tape& tape, const Tensor& a) {
  if (a.rank() < 1 || a.dim(0) == 0) {
    throw DimensionError("mean_axis0 needs a non-empty leading axis, got " +
                         shape_string(a.shape()));
  }
  const std::size_t n = a.dim(0);
  const std::size_t inner = a.numel() / n;
  Shape out_shape(a.shape().begin() + 1, a.shape().end());
  if (out_shape.empty()) out_shape = {1};
  Tensor out = Tensor::zeros(out_shape);
  float* y = out.mutable_data().data();
  const float* x = a.data().data();
  for (std::size_t i = 0; i < n; ++i) K().accumulate(inner, x + i * inner, y);
  const float inv_n = 1.0f / static_cast<float>(n);
  K().scale(inner, y, inv_n, y);
  if (tape.should_record({&a})) {
    tape.record({a}, out, [n, inner, inv_n](const Tensor& o,
                                            std::vector<Tensor>& in) {
      std::vector<float> share(inner);
      K().scale(inner, o.grad().data(), inv_n, share.data());
      for (std::size_t i = 0; i < n; ++i) AccumulateSlice(in[0], i * inner, share);
    });
  }
  return out;
}

Tensor stack(Tape& tape, std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("stack of zero tensors");
  const Shape& inner_shape = parts.front().shape();
  for (const Tensor& p : parts) RequireSameShape("stack", parts.front(), p);
  const std::size_t inner = parts.front().numel();
  Shape out_shape{parts.size()};
  out_shape.insert(out_shape.end(), inner_shape.begin(), inner_shape.end());
  Tensor out = Tensor::zeros(out_shape);
  float* y = out.mutable_data().data();
  bool record = false;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::copy_n(parts[i].data().data(), inner, y + i * inner);
    record = record || tape.should_record({&parts[i]});
  }
  if (record) {
    tape.record(std::vector<Tensor>(parts.begin(), parts.end()), out,
                [inner](const Tensor& o, std::vector<Tensor>& in) {
                  for (std::size_t i = 0; i < in.size(); ++i) {
                    accumulate_grad(in[i], o.grad().subspan(i * inner, inner));
                  }
                });
  }
  return out;
}

Tensor select(Tape& tape, const Tensor& a, std::size_t index) {
  if (a.rank() < 1 || index >= a.dim(0)) {
    throw DimensionError("select: index " + std::to_string(index) +
                         " out of range for shape " + shape_string(a.shape()));
  }
  const std::size_t inner = a.numel() / a.dim(0);
  Shape out_shape(a.shape().begin() + 1, a.shape().end());
  if (out_shape.empty()) out_shape = {1};
  std::vector<float> values(a.data().begin() + index * inner,
                            a.data().begin() + (index + 1) * inner);
  Tensor out = Tensor::from(out_shape, std::move(values));
  if (tape.should_record({&a})) {
    tape.record({a}, out, [index, inner](const Tensor& o,
                                         std::vector<Tensor>& in) {
      AccumulateSlice(in[0], index * inner, o.grad());
    });
  }
  return out;
}

Tensor reshape(Tape& tape, const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw DimensionError("reshape: cannot view " + shape_string(a.shape()) +
                         " as " + shape_string(shape));
  }
  Tensor out = Tensor::from(std::move(shape),
                            std::vector<float>(a.data().begin(), a.data().end()));
  if (tape.should_record({&a})) {
    tape.record({a}, out, [](const Tensor& o, std::vector<Tensor>& in) {
      accumulate_grad(in[0], o.grad());
    });
  }
  return out;
}

Tensor spike(Tape& tape, const Tensor& v, float v_th,
             const SurrogateSpec& surrogate) {
  surrogate.validate();
  Tensor out = Tensor::zeros(v.shape());
  K().heaviside(v.numel(), v.data().data(), v_th, out.mutable_data().data());
  if (tape.should_record({&v})) {
    tape.record({v}, out, [v_th, surrogate](const Tensor& o,
                                            std::vector<Tensor>& in) {
      std::vector<float> d(o.numel());
      K().surrogate_grad(d.size(), in[0].data().data(), v_th, surrogate.kind,
                         surrogate.width, o.grad().data(), d.data());
      accumulate_grad(in[0], d);
    });
  }
  return out;
}

Tensor lif_update(Tape& tape, const Tensor& v, const Tensor& s_prev,
                  const Tensor& current, kernels::LifCoeffs coeffs,
                  bool detach_reset) {
  RequireSameShape("lif_update", v, current);
  RequireSameShape("lif_update", v, s_prev);
  Tensor out = Tensor::zeros(v.shape());
  K().lif_forward(v.numel(), v.data().data(), s_prev.data().data(),
                  current.data().data(), coeffs, out.mutable_data().data());
  const bool record = detach_reset ? tape.should_record({&v, &current})
                                   : tape.should_record({&v, &s_prev, &current});
  if (record) {
    tape.record({v, s_prev, current}, out,
                [coeffs, detach_reset](const Tensor& o,
                                       std::vector<Tensor>& in) {
                  const std::size_t n = o.numel();
                  std::vector<float> dv(n), ds, dc(n);
                  const bool want_ds = !detach_reset && in[1].tracks_grad();
                  if (want_ds) ds.resize(n);
                  K().lif_backward(n, o.grad().data(), in[0].data().data(),
                                   in[1].data().data(), coeffs, dv.data(),
                                   want_ds ? ds.data() : nullptr, dc.data());
                  accumulate_grad(in[0], dv);
                  if (want_ds) accumulate_grad(in[1], ds);
                  accumulate_grad(in[2], dc);
                });
  }
  return out;
}

namespace {

struct ConvGeometry {
  std::size_t batch, channels, height, width;
  std::size_t out_channels, kernel, stride, padding;
  std::size_t out_h, out_w;
  std::size_t patch() const { return channels * kernel * kernel; }
  std::size_t pixels() const { return out_h * out_w; }
};

// cols [C*K*K, Ho*Wo] for one sample.
void Im2Col(const ConvGeometry& g, const float* x, float* cols) {
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const std::size_t row = (c * g.kernel + ki) * g.kernel + kj;
        float* dst = cols + row * g.pixels();
        for (std::size_t oi = 0; oi < g.out_h; ++oi) {
          for (std::size_t oj = 0; oj < g.out_w; ++oj) {
            const long ii = static_cast<long>(oi * g.stride + ki) -
                            static_cast<long>(g.padding);
            const long jj = static_cast<long>(oj * g.stride + kj) -
                            static_cast<long>(g.padding);
            const bool inside = ii >= 0 && jj >= 0 &&
                                ii < static_cast<long>(g.height) &&
                                jj < static_cast<long>(g.width);
            dst[oi * g.out_w + oj] =
                inside ? x[(c * g.height + ii) * g.width + jj] : 0.0f;
          }
        }
      }
    }
  }
}

void Col2ImAccumulate(const ConvGeometry& g, const float* cols, float* dx) {
  for (std::size_t c = 0; c < g.channels; ++c) {
    for (std::size_t ki = 0; ki < g.kernel; ++ki) {
      for (std::size_t kj = 0; kj < g.kernel; ++kj) {
        const std::size_t row = (c * g.kernel + ki) * g.kernel + kj;
        const float* src = cols + row * g.pixels();
        for (std::size_t oi = 0; oi < g.out_h; ++oi) {
          for (std::size_t oj = 0; oj < g.out_w; ++oj) {
            const long ii = static_cast<long>(oi * g.stride + ki) -
                            static_cast<long>(g.padding);
            const long jj = static_cast<long>(oj * g.stride + kj) -
                            static_cast<long>(g.padding);
            if (ii >= 0 && jj >= 0 && ii < static_cast<long>(g.height) &&
                jj < static_cast<long>(g.width)) {
              dx[(c * g.height + ii) * g.width + jj] += src[oi * g.out_w + oj];
            }
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& w, const Tensor& b,
              std::size_t stride, std::size_t padding) {
  RequireRank("conv2d input", x, 4);
  RequireRank("conv2d weight", w, 4);
  RequireRank("conv2d bias", b, 1);
  if (stride == 0) throw ParameterError("conv2d stride must be positive");
  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2),
                 stride,   padding,  0,        0};
  if (w.dim(1) != g.channels || w.dim(3) != g.kernel || b.dim(0) != g.out_channels) {
    throw DimensionError("conv2d: weight " + shape_string(w.shape()) +
                         " / bias " + shape_string(b.shape()) +
                         " incompatible with input " + shape_string(x.shape()));
  }
  if (g.height + 2 * padding < g.kernel || g.width + 2 * padding < g.kernel) {
    throw DimensionError("conv2d: kernel larger than padded input " +
                         shape_string(x.shape()));
  }
  g.out_h = (g.height + 2 * padding - g.kernel) / stride + 1;
  g.out_w = (g.width + 2 * padding - g.kernel) / stride + 1;

  Tensor out = Tensor::zeros({g.batch, g.out_channels, g.out_h, g.out_w});
  std::vector<float> cols(g.patch() * g.pixels());
  const std::size_t in_stride = g.channels * g.height * g.width;
  const std::size_t out_stride = g.out_channels * g.pixels();
  float* y = out.mutable_data().data();
  for (std::size_t n = 0; n < g.batch; ++n) {
    Im2Col(g, x.data().data() + n * in_stride, cols.data());
    float* yn = y + n * out_stride;
    K().gemm(g.out_channels, g.pixels(), g.patch(), w.data().data(),
             cols.data(), yn);
    for (std::size_t o = 0; o < g.out_channels; ++o) {
      const float bias = b.at(o);
      for (std::size_t p = 0; p < g.pixels(); ++p) yn[o * g.pixels() + p] += bias;
    }
  }

  if (tape.should_record({&x, &w, &b})) {
    tape.record({x, w, b}, out, [g, in_stride, out_stride](
                                    const Tensor& o, std::vector<Tensor>& in) {
      const float* gy = o.grad().data();
      std::vector<float> cols(g.patch() * g.pixels());
      std::vector<float> cols_t(cols.size());
      std::vector<float> dw(g.out_channels * g.patch(), 0.0f);
      std::vector<float> dw_n(dw.size());
      std::vector<float> db(g.out_channels, 0.0f);
      std::vector<float> wt(g.patch() * g.out_channels);
      std::vector<float> dcols(cols.size());
      std::vector<float> dx(in[0].tracks_grad() ? in[0].numel() : 0, 0.0f);
      transpose(g.out_channels, g.patch(), in[1].data().data(), wt.data());
      for (std::size_t n = 0; n < g.batch; ++n) {
        const float* gyn = gy + n * out_stride;
        if (in[1].tracks_grad()) {
          Im2Col(g, in[0].data().data() + n * in_stride, cols.data());
          transpose(g.patch(), g.pixels(), cols.data(), cols_t.data());
          K().gemm(g.out_channels, g.patch(), g.pixels(), gyn, cols_t.data(),
                   dw_n.data());
          K().accumulate(dw.size(), dw_n.data(), dw.data());
        }
        for (std::size_t oc = 0; oc < g.out_channels; ++oc) {
          float acc = 0.0f;
          for (std::size_t p = 0; p < g.pixels(); ++p) acc += gyn[oc * g.pixels() + p];
          db[oc] += acc;
        }
        if (!dx.empty()) {
          K().gemm(g.patch(), g.pixels(), g.out_channels, wt.data(), gyn,
                   dcols.data());
          Col2ImAccumulate(g, dcols.data(), dx.data() + n * in_stride);
        }
      }
      if (!dx.empty()) accumulate_grad(in[0], dx);
      accumulate_grad(in[1], dw);
      accumulate_grad(in[2], db);
    });
  }
  return out;
}

Tensor avg_pool2d(Tape& tape, const Tensor& x, std::size_t window) {
  RequireRank("avg_pool2d", x, 4);
  if (window == 0) throw ParameterError("avg_pool2d window must be positive");
  const std::size_t nb = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t oh = h / window, ow = w / window;
  if (oh == 0 || ow == 0) {
    throw DimensionError("avg_pool2d: window " + std::to_string(window) +
                         " larger than input " + shape_string(x.shape()));
  }
  Tensor out = Tensor::zeros({nb, c, oh, ow});
  const float inv = 1.0f / static_cast<float>(window * window);
  const float* xd = x.data().data();
  float* y = out.mutable_data().data();
  for (std::size_t plane = 0; plane < nb * c; ++plane) {
    for (std::size_t i = 0; i < oh; ++i) {
      for (std::size_t j = 0; j < ow; ++j) {
        float acc = 0.0f;
        for (std::size_t di = 0; di < window; ++di) {
          for (std::size_t dj = 0; dj < window; ++dj) {
            acc += xd[(plane * h + i * window + di) * w + j * window + dj];
          }
        }
        y[(plane * oh + i) * ow + j] = acc * inv;
      }
    }
  }
  if (tape.should_record({&x})) {
    tape.record({x}, out, [nb, c, h, w, oh, ow, window, inv](
                              const Tensor& o, std::vector<Tensor>& in) {
      std::vector<float> dx(in[0].numel(), 0.0f);
      const float* g = o.grad().data();
      for (std::size_t plane = 0; plane < nb * c; ++plane) {
        for (std::size_t i = 0; i < oh; ++i) {
          for (std::size_t j = 0; j < ow; ++j) {
            const float share = g[(plane * oh + i) * ow + j] * inv;
            for (std::size_t di = 0; di < window; ++di) {
              for (std::size_t dj = 0; dj < window; ++dj) {
                dx[(plane * h + i * window + di) * w + j * window + dj] += share;
              }
            }
          }
        }
      }
      accumulate_grad(in[0], dx);
    });
  }
  return out;
}

}  // namespace tks::ops
