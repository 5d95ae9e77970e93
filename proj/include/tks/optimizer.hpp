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
#include <span>
#include <string>
#include <vector>

#include "tks/tensor.hpp"

namespace tks {

enum class OptimizerKind {
  kAdamW,  // decoupled weight decay
  kAdam,   // weight decay folded into the gradient (L2)
};

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_kind_from_string(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::kAdamW;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.01f;
  float clip_norm = 0.0f;  // global gradient-norm clip; 0 disables

  void validate() const;
};

struct OptimizerState {
  OptimizerConfig cfg;
  float lr = 1e-3f;
  std::uint64_t step = 0;
  std::vector<std::vector<float>> m;  // first moments, one per parameter
  std::vector<std::vector<float>> v;  // second moments
};

OptimizerState make_optimizer(std::span<const Tensor> params,
                              const OptimizerConfig& cfg, float lr);

// One adaptive-moment update from the parameters' gradient slots, which are
// cleared afterwards. Throws ContractError if any gradient is missing.
void optimizer_step(std::span<Tensor> params, OptimizerState& state);

// Rescales all gradients so their joint L2 norm is at most max_norm.
// Returns the norm before clipping.
double clip_grad_norm(std::span<Tensor> params, double max_norm);

// Cosine annealing from lr_max at epoch 0 to lr_min at the last epoch.
float cosine_lr(std::size_t epoch, std::size_t total_epochs, float lr_max,
                float lr_min);

}  // namespace tks
