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

#include <string>

#include "tks/kernels.hpp"

namespace tks {

using SurrogateKind = kernels::SurrogateKind;

// Stand-in derivative of the Heaviside spike used on the backward pass.
// With x = v - v_th and a = width:
//   rectangular          1/a                      for |x| < a
//   triangular           (1/a) * (1 - |x|/a)      for |x| < a
//   piecewise_quadratic  (2/a) * (1 - |x|/a)      for |x| < a
// and zero elsewhere. piecewise_quadratic is the derivative of the
// approximate-sign function of Bi-Real Net at a = 1.
struct SurrogateSpec {
  SurrogateKind kind = SurrogateKind::kPiecewiseQuadratic;
  float width = 1.0f;

  // Throws ParameterError unless width > 0 and finite.
  void validate() const;
  float derivative(float x) const;
};

std::string to_string(SurrogateKind kind);
SurrogateKind surrogate_kind_from_string(const std::string& name);

}  // namespace tks
