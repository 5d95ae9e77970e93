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
#include <utility>

#include "tks/surrogate.hpp"
#include "tks/tape.hpp"
#include "tks/tensor.hpp"

namespace tks {

// Discrete leaky integrate-and-fire neuron:
//   v[t] = (1 - 1/tau_m) * v[t-1] * (1 - s[t-1]) + (1/tau_m) * I[t]
//   s[t] = v[t] >= v_th
// A nonzero v_rest replaces the carried potential with
// v_rest * s[t-1] + v[t-1] * (1 - s[t-1]) before the leak.
struct LifConfig {
  float tau_m = 2.0f;
  float v_th = 0.5f;
  float v_rest = 0.0f;
  bool detach_reset = false;

  // tau_m > 1, v_rest < v_th, all finite.
  void validate() const;
  float leak() const { return 1.0f - 1.0f / tau_m; }
  float inv_tau() const { return 1.0f / tau_m; }
};

struct LifState {
  Tensor v;       // membrane potential
  Tensor s_prev;  // spikes emitted on the previous step
};

// v = v_rest and no spikes, shape [batch, neurons...].
LifState reset_state(const Shape& shape, const LifConfig& cfg);
LifState reset_state(std::size_t batch, std::size_t neurons,
                     const LifConfig& cfg);

// One step of the recurrence. Returns the new state and the emitted spikes
// (the same tensor as the new state's s_prev).
std::pair<LifState, Tensor> lif_step(Tape& tape, const LifState& state,
                                     const Tensor& input_current,
                                     const LifConfig& cfg,
                                     const SurrogateSpec& surrogate);

}  // namespace tks
