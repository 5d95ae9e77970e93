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

#include "tks/lif.hpp"

#include <cmath>

#include "tks/error.hpp"
#include "tks/ops.hpp"

namespace tks {

void LifConfig::validate() const {
  if (!std::isfinite(tau_m) || !(tau_m > 1.0f)) {
    throw ParameterError("lif tau_m must be > 1, got " + std::to_string(tau_m));
  }
  if (!std::isfinite(v_th) || !std::isfinite(v_rest) || !(v_rest < v_th)) {
    throw ParameterError("lif needs finite v_rest < v_th, got v_rest=" +
                         std::to_string(v_rest) +
                         " v_th=" + std::to_string(v_th));
  }
}

LifState reset_state(const Shape& shape, const LifConfig& cfg) {
  if (shape.empty()) throw ParameterError("lif state needs a shape");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ParameterError("lif state sizes must be positive, got " +
                           shape_string(shape));
    }
  }
  return LifState{Tensor::full(shape, cfg.v_rest), Tensor::zeros(shape)};
}

LifState reset_state(std::size_t batch, std::size_t neurons,
                     const LifConfig& cfg) {
  return reset_state(Shape{batch, neurons}, cfg);
}

std::pair<LifState, Tensor> lif_step(Tape& tape, const LifState& state,
                                     const Tensor& input_current,
                                     const LifConfig& cfg,
                                     const SurrogateSpec& surrogate) {
  if (input_current.shape() != state.v.shape()) {
    throw DimensionError("lif_step: input current " +
                         shape_string(input_current.shape()) +
                         " does not match state " +
                         shape_string(state.v.shape()));
  }
  const kernels::LifCoeffs coeffs{cfg.leak(), cfg.inv_tau(), cfg.v_rest};
  Tensor v = ops::lif_update(tape, state.v, state.s_prev, input_current,
                             coeffs, cfg.detach_reset);
  Tensor s = ops::spike(tape, v, cfg.v_th, surrogate);
  return {LifState{v, s}, s};
}

}  // namespace tks
