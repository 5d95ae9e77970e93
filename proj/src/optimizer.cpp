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

#include "tks/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "tks/error.hpp"
#include "tks/kernels.hpp"

namespace tks {

std::string to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdamW ? "adamw" : "adam";
}

OptimizerKind optimizer_kind_from_string(const std::string& name) {
  if (name == "adamw") return OptimizerKind::kAdamW;
  if (name == "adam") return OptimizerKind::kAdam;
  throw ConfigError("unknown optimizer '" + name + "' (expected adamw or adam)");
}

void OptimizerConfig::validate() const {
  auto open_unit = [](float b) { return b >= 0.0f && b < 1.0f; };
  if (!open_unit(beta1) || !open_unit(beta2)) {
    throw ParameterError("optimizer betas must lie in [0, 1)");
  }
  if (!(eps >= 0.0f) || !(weight_decay >= 0.0f) || !(clip_norm >= 0.0f)) {
    throw ParameterError("optimizer eps, weight_decay and clip_norm must be >= 0");
  }
}

OptimizerState make_optimizer(std::span<const Tensor> params,
                              const OptimizerConfig& cfg, float lr) {
  cfg.validate();
  OptimizerState state;
  state.cfg = cfg;
  state.lr = lr;
  for (const Tensor& p : params) {
    state.m.emplace_back(p.numel(), 0.0f);
    state.v.emplace_back(p.numel(), 0.0f);
  }
  return state;
}

void optimizer_step(std::span<Tensor> params, OptimizerState& state) {
  if (params.size() != state.m.size()) {
    throw ContractError("optimizer holds state for " +
                        std::to_string(state.m.size()) + " parameters, got " +
                        std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw ContractError("optimizer_step: parameter " + std::to_string(i) +
                          " has no gradient; run backward first");
    }
    if (params[i].numel() != state.m[i].size()) {
      throw ContractError("optimizer_step: parameter " + std::to_string(i) +
                          " changed size");
    }
  }
  if (state.cfg.clip_norm > 0.0f) clip_grad_norm(params, state.cfg.clip_norm);

  state.step += 1;
  const OptimizerConfig& cfg = state.cfg;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(static_cast<double>(cfg.beta1), t);
  const double bias2 = 1.0 - std::pow(static_cast<double>(cfg.beta2), t);
  const bool decoupled = cfg.kind == OptimizerKind::kAdamW;
  kernels::AdamCoeffs c{};
  c.decay = decoupled ? 1.0f - state.lr * cfg.weight_decay : 1.0f;
  c.beta1 = cfg.beta1;
  c.one_minus_beta1 = 1.0f - cfg.beta1;
  c.beta2 = cfg.beta2;
  c.one_minus_beta2 = 1.0f - cfg.beta2;
  c.step_size = static_cast<float>(state.lr / bias1);
  c.sqrt_bias2 = static_cast<float>(std::sqrt(bias2));
  c.eps = cfg.eps;

  const kernels::KernelTable& k = kernels::active();
  std::vector<float> coupled;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const float* g = p.grad().data();
    if (!decoupled && cfg.weight_decay != 0.0f) {
      coupled.assign(p.grad().begin(), p.grad().end());
      for (std::size_t j = 0; j < coupled.size(); ++j) {
        coupled[j] += cfg.weight_decay * p.data()[j];
      }
      g = coupled.data();
    }
    k.adam(p.numel(), p.mutable_data().data(), g, state.m[i].data(),
           state.v[i].data(), c);
    p.clear_grad();
  }
}

double clip_grad_norm(std::span<Tensor> params, double max_norm) {
  double sq = 0.0;
  for (const Tensor& p : params) {
    for (float g : p.grad()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const float s = static_cast<float>(max_norm / norm);
    for (Tensor& p : params) {
      std::span<float> g = p.mutable_grad();
      kernels::active().scale(g.size(), g.data(), s, g.data());
    }
  }
  return norm;
}

float cosine_lr(std::size_t epoch, std::size_t total_epochs, float lr_max,
                float lr_min) {
  if (epoch >= total_epochs) {
    throw ParameterError("cosine_lr: epoch " + std::to_string(epoch) +
                         " outside " + std::to_string(total_epochs) + " epochs");
  }
  if (total_epochs == 1) return lr_max;
  const double frac =
      static_cast<double>(epoch) / static_cast<double>(total_epochs - 1);
  return static_cast<float>(
      lr_min + 0.5 * (static_cast<double>(lr_max) - lr_min) *
                   (1.0 + std::cos(std::numbers::pi * frac)));
}

}  // namespace tks
