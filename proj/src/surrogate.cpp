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

#include "tks/surrogate.hpp"

#include <cmath>

#include "kernels/kernels_impl.hpp"
#include "tks/error.hpp"

namespace tks {

void SurrogateSpec::validate() const {
  if (!(width > 0.0f) || !std::isfinite(width)) {
    throw ParameterError("surrogate width must be positive and finite, got " +
                         std::to_string(width));
  }
}

float SurrogateSpec::derivative(float x) const {
  return kernels::ScalarSurrogate(x, kind, width);
}

std::string to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::kRectangular:
      return "rectangular";
    case SurrogateKind::kTriangular:
      return "triangular";
    case SurrogateKind::kPiecewiseQuadratic:
      return "piecewise_quadratic";
  }
  return "unknown";
}

SurrogateKind surrogate_kind_from_string(const std::string& name) {
  if (name == "rectangular") return SurrogateKind::kRectangular;
  if (name == "triangular") return SurrogateKind::kTriangular;
  if (name == "piecewise_quadratic") return SurrogateKind::kPiecewiseQuadratic;
  throw ConfigError("unknown surrogate kind '" + name +
                    "' (expected rectangular, triangular or "
                    "piecewise_quadratic)");
}

}  // namespace tks
