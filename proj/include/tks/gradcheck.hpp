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
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tks/tape.hpp"
#include "tks/tensor.hpp"

namespace tks {

// Builds a differentiable output from the given inputs on the given tape.
using GradForward = std::function<Tensor(Tape&, const std::vector<Tensor>&)>;

// Largest relative error between reverse-mode and central finite-difference
// gradients of sum(out * r) for a fixed random projection r, over every
// entry of every input. Relative error is |a - n| / max(|a|, |n|, floor).
double max_gradient_error(const GradForward& forward, const std::vector<Tensor>& inputs,
                          std::uint64_t seed, float step = 1e-2f, double floor = 1.0);

struct GradcheckCase {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradcheckReport {
  std::vector<GradcheckCase> cases;
  double max_rel_error = 0.0;
  // Entries where the spike backward differs from the closed-form surrogate.
  std::size_t spike_mismatches = 0;
};

// Every differentiable op on small random tensors, plus the readout of a
// small mlp-small model under the combined loss, for `seeds` seeds.
GradcheckReport run_gradcheck(std::size_t seeds = 10, std::uint64_t base_seed = 0);

}  // namespace tks
