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

// Reference implementations used to check the library. They work in double
// precision with straightforward loops and share no code with src/.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "tks/tensor.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline std::vector<float> RandomFloats(std::size_t n, std::mt19937_64& rng, float lo = -1.0f,
                                       float hi = 1.0f) {
  std::uniform_real_distribution<float> d(lo, hi);
  std::vector<float> v(n);
  for (float& x : v) x = d(rng);
  return v;
}

inline Vec ToDouble(std::span<const float> v) { return Vec(v.begin(), v.end()); }

// Central differences of f at x in double precision.
inline Vec FiniteDifference(const std::function<double(const Vec&)>& f, Vec x,
                            double step = 1e-3) {
  Vec grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double hi = f(x);
    x[i] = saved - step;
    const double lo = f(x);
    x[i] = saved;
    grad[i] = (hi - lo) / (2 * step);
  }
  return grad;
}

inline double MaxRelError(std::span<const float> analytic, const Vec& numeric,
                          double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double a = analytic[i];
    const double denom = std::max({std::abs(a), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(a - numeric[i]) / denom);
  }
  return worst;
}

inline Vec Matmul(const Vec& a, const Vec& b, std::size_t m, std::size_t k, std::size_t n) {
  Vec c(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t p = 0; p < k; ++p) c[i * n + j] += a[i * k + p] * b[p * n + j];
  return c;
}

inline Vec Softmax(const Vec& x, std::size_t cols, double tau = 1.0) {
  Vec out(x.size());
  for (std::size_t r = 0; r < x.size() / cols; ++r) {
    double mx = -INFINITY;
    for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, x[r * cols + j]);
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) z += std::exp((x[r * cols + j] - mx) / tau);
    for (std::size_t j = 0; j < cols; ++j)
      out[r * cols + j] = std::exp((x[r * cols + j] - mx) / tau) / z;
  }
  return out;
}

inline double Dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double ClampedLog(double x) { return std::log(std::max(x, 1e-12)); }

// AURC by recounting every prefix from scratch.
inline double BruteAurc(const std::vector<float>& conf, const std::vector<std::uint8_t>& ok) {
  const std::size_t n = conf.size();
  std::vector<std::size_t> order;
  std::vector<bool> used(n, false);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      if (best == n || conf[i] > conf[best]) best = i;
    }
    used[best] = true;
    order.push_back(best);
  }
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t errors = 0;
    for (std::size_t j = 0; j < i; ++j) errors += ok[order[j]] ? 0 : 1;
    total += static_cast<double>(errors) / static_cast<double>(i);
  }
  return total / static_cast<double>(n);
}

}  // namespace oracle
