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

#include <random>

#include "tks/data.hpp"
#include "tks/error.hpp"

namespace tks {
namespace {

bool IsPrime(std::size_t n) {
  if (n < 2) return false;
  for (std::size_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

std::size_t synth_block_count(std::size_t classes) {
  if (classes < 2) throw ParameterError("synthetic task needs at least 2 classes");
  const std::size_t pairs = (classes + 1) / 2;
  std::size_t b = 2 * pairs + 1;
  while (!IsPrime(b)) ++b;
  return b;
}

std::vector<std::vector<std::size_t>> synth_schedules(std::size_t T,
                                                      std::size_t classes) {
  if (T < 2) throw ParameterError("synthetic task needs T >= 2, got " + std::to_string(T));
  const std::size_t blocks = synth_block_count(classes);
  if (blocks > T) {
    throw ParameterError(std::to_string(classes) + " classes need " +
                         std::to_string(blocks) + " blocks but T = " +
                         std::to_string(T) + " cannot visit them all");
  }
  std::vector<std::vector<std::size_t>> out(classes, std::vector<std::size_t>(T));
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t stride = c / 2 + 1;
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t step = (c % 2 == 0) ? t : T - 1 - t;
      out[c][t] = (stride * step) % blocks;
    }
  }
  return out;
}

Dataset synth_temporal(const SynthSpec& spec) {
  if (spec.n_per_class == 0) throw ParameterError("n_per_class must be >= 1");
  if (spec.block_width == 0) throw ParameterError("block_width must be >= 1");
  if (!(spec.noise_sigma >= 0.0f)) throw ParameterError("noise_sigma must be >= 0");
  const auto schedules = synth_schedules(spec.T, spec.classes);
  const std::size_t blocks = synth_block_count(spec.classes);
  const std::size_t features = blocks * spec.block_width;
  const std::size_t n = spec.n_per_class * spec.classes;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<float> noise(0.0f, 1.0f);
  std::vector<float> values(n * spec.T * features, 0.0f);
  std::vector<int> labels(n);
  // Samples interleave classes so any prefix is roughly balanced.
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % spec.classes;
    labels[i] = static_cast<int>(c);
    for (std::size_t t = 0; t < spec.T; ++t) {
      float* frame = values.data() + (i * spec.T + t) * features;
      const std::size_t first = schedules[c][t] * spec.block_width;
      for (std::size_t f = 0; f < spec.block_width; ++f) frame[first + f] = spec.amplitude;
      if (spec.noise_sigma > 0.0f) {
        for (std::size_t f = 0; f < features; ++f) frame[f] += spec.noise_sigma * noise(rng);
      }
    }
  }
  Dataset d;
  d.inputs = Tensor::from({n, spec.T, features}, std::move(values));
  d.labels = std::move(labels);
  d.class_count = spec.classes;
  d.split = "synthetic";
  d.temporal = true;
  return d;
}

}  // namespace tks
