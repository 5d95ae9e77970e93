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

#include "tks/kernels.hpp"

namespace tks::kernels {

// Reference surrogate derivative evaluated at x = v - threshold.
float ScalarSurrogate(float x, SurrogateKind kind, float width);

#if defined(TKS_HAVE_AVX2)
const KernelTable& avx2_table();
bool avx2_supported();
#endif
#if defined(TKS_HAVE_NEON)
const KernelTable& neon_table();
#endif

}  // namespace tks::kernels
