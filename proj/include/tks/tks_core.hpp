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
#include <span>
#include <string>
#include <vector>

#include "tks/tape.hpp"
#include "tks/tensor.hpp"

// Temporal knowledge sharing: every timestep of the unrolled network is a
// sub-model with its own output distribution V[t]. The best-fitting
// sub-models (by true-class probability) form a temperature-smoothed teacher
// Z that all timesteps are trained to match, alongside the usual
// cross-entropy of the time-averaged output.

namespace tks {

enum class TeacherMode { kTks, kNone, kLabelSmoothing, kPerTimestepLabels };

std::string to_string(TeacherMode mode);
TeacherMode teacher_mode_from_string(const std::string& name);

struct TeacherConfig {
  TeacherMode mode = TeacherMode::kTks;
  std::size_t k = 2;      // sub-models averaged into the teacher
  float tau = 3.0f;       // teacher temperature
  float epsilon = 0.1f;   // label-smoothing mass

  // tau > 0, 0 <= epsilon < 1, k >= 1. k <= T is checked at use.
  void validate() const;
};

struct TeacherSignal {
  Tensor z;  // [B, C], detached
  std::vector<std::vector<std::size_t>> selected;  // per sample, best first
};

struct AlphaSchedule {
  float alpha_start = 0.0f;
  float alpha_end = 0.7f;
  std::size_t total_epochs = 1;

  void validate() const;
};

// Teacher temperature and alpha ramp per data regime.
struct TeacherPreset {
  float tau;
  float alpha_start;
  float alpha_end;
};
// "static" (tau 3, alpha 0 -> 0.7), "event" (tau 5, alpha 0 -> 0.3),
// "large" (tau 1, alpha 0 -> 0.7).
TeacherPreset teacher_preset(const std::string& name);

struct LossBreakdown {
  double l_ce = 0.0;
  double l_tks = 0.0;
  double l_final = 0.0;
  double alpha = 0.0;
  std::vector<double> l_sub;  // per-timestep diagnostic losses
};

// v[t] = softmax(q[t]); o = mean_t v[t]. q is [T, B, C].
struct Aggregated {
  Tensor v;  // [T, B, C]
  Tensor o;  // [B, C]
};
Aggregated aggregate_output(Tape& tape, const Tensor& q);

// Per sample, the k timesteps with the highest true-class probability,
// ties toward smaller t. Returned best first.
std::vector<std::vector<std::size_t>> select_teachers(
    const Tensor& v, std::span<const int> labels, std::size_t k);

// Per sample: mean of the selected timesteps' logits, then softmax at tau.
TeacherSignal teacher_signal(const Tensor& q,
                             std::vector<std::vector<std::size_t>> selected,
                             float tau);

// -mean_{t,b} sum_c z[b,c] log v[t,b,c]
Tensor tks_loss(Tape& tape, const Tensor& v, const TeacherSignal& z);

// -mean_b log(mean_t v[t,b,y_b])
Tensor ce_loss(Tape& tape, const Tensor& v, std::span<const int> labels);

// (1 - alpha) * l_ce + alpha * tau^2 * l_tks
Tensor final_loss(Tape& tape, const Tensor& l_ce, const Tensor& l_tks,
                  float alpha, float tau);
double final_loss(double l_ce, double l_tks, double alpha, double tau);

// (1 - alpha) * l_ce / T + alpha * tau^2 * CE(v[t] || z). Diagnostic only.
double sub_model_loss(std::size_t t, double l_ce, const Tensor& v,
                      const TeacherSignal& z, double alpha, double tau,
                      std::size_t T);

// Linear ramp from alpha_start (epoch 0) to alpha_end (last epoch).
float alpha_at(std::size_t epoch, const AlphaSchedule& sched);

// Losses of the comparison modes: kNone is plain ce_loss, kLabelSmoothing
// is the cross-entropy of o against the epsilon-smoothed one-hot target,
// kPerTimestepLabels is mean_t CE(v[t] || one-hot y).
Tensor baseline_loss(Tape& tape, TeacherMode mode, const Tensor& v,
                     std::span<const int> labels, float epsilon);

// Everything one training step needs: the loss to differentiate and the
// logged components. For kTks the teacher is built from q.
struct StepLoss {
  Tensor loss;
  LossBreakdown parts;
};
StepLoss compute_step_loss(Tape& tape, const Tensor& q, const Tensor& v,
                           std::span<const int> labels,
                           const TeacherConfig& cfg, float alpha);

}  // namespace tks
