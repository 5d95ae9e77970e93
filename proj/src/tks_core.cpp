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

#include "tks/tks_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tks/error.hpp"
#include "tks/ops.hpp"

namespace tks {
namespace {

struct Dims {
  std::size_t t, b, c;
};

Dims TemporalDims(const Tensor& v, const char* what) {
  if (v.rank() != 3) {
    throw DimensionError(std::string(what) + ": expected [T, B, C], got " +
                         shape_string(v.shape()));
  }
  return {v.dim(0), v.dim(1), v.dim(2)};
}

void CheckLabels(std::span<const int> labels, std::size_t batch,
                 std::size_t classes) {
  if (labels.size() != batch) {
    throw DimensionError("got " + std::to_string(labels.size()) +
                         " labels for a batch of " + std::to_string(batch));
  }
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= classes) {
      throw DataError("label " + std::to_string(labels[b]) + " of sample " +
                      std::to_string(b) + " outside [0, " +
                      std::to_string(classes) + ")");
    }
  }
}

// One-hot rows [B, C], tiled `repeat` times along a new leading axis when
// repeat > 0.
Tensor Targets(std::span<const int> labels, std::size_t classes, float on,
               float off, std::size_t repeat) {
  const std::size_t b = labels.size();
  std::vector<float> rows(b * classes, off);
  for (std::size_t i = 0; i < b; ++i) rows[i * classes + labels[i]] = on;
  if (repeat == 0) return Tensor::from({b, classes}, std::move(rows));
  std::vector<float> tiled;
  tiled.reserve(repeat * rows.size());
  for (std::size_t t = 0; t < repeat; ++t) {
    tiled.insert(tiled.end(), rows.begin(), rows.end());
  }
  return Tensor::from({repeat, b, classes}, std::move(tiled));
}

// -scale_div^-1 * sum(target * log(p))
Tensor CrossEntropy(Tape& tape, const Tensor& p, const Tensor& target,
                    std::size_t denominator) {
  Tensor weighted = ops::mul(tape, ops::log(tape, p), target);
  return ops::scale(tape, ops::sum(tape, weighted),
                    -1.0f / static_cast<float>(denominator));
}

}  // namespace

std::string to_string(TeacherMode mode) {
  switch (mode) {
    case TeacherMode::kTks:
      return "tks";
    case TeacherMode::kNone:
      return "none";
    case TeacherMode::kLabelSmoothing:
      return "label_smoothing";
    case TeacherMode::kPerTimestepLabels:
      return "per_timestep_labels";
  }
  return "unknown";
}

TeacherMode teacher_mode_from_string(const std::string& name) {
  if (name == "tks") return TeacherMode::kTks;
  if (name == "none") return TeacherMode::kNone;
  if (name == "label_smoothing") return TeacherMode::kLabelSmoothing;
  if (name == "per_timestep_labels") return TeacherMode::kPerTimestepLabels;
  throw ConfigError("unknown teacher mode '" + name +
                    "' (expected tks, none, label_smoothing or "
                    "per_timestep_labels)");
}

void TeacherConfig::validate() const {
  if (k < 1) throw ParameterError("teacher k must be at least 1");
  if (!(tau > 0.0f) || !std::isfinite(tau)) {
    throw ParameterError("teacher tau must be positive, got " +
                         std::to_string(tau));
  }
  if (!(epsilon >= 0.0f && epsilon < 1.0f)) {
    throw ParameterError("label smoothing epsilon must lie in [0, 1), got " +
                         std::to_string(epsilon));
  }
}

void AlphaSchedule::validate() const {
  auto in_unit = [](float a) { return a >= 0.0f && a <= 1.0f; };
  if (!in_unit(alpha_start) || !in_unit(alpha_end)) {
    throw ParameterError("alpha schedule endpoints must lie in [0, 1]");
  }
}

TeacherPreset teacher_preset(const std::string& name) {
  if (name == "static") return {3.0f, 0.0f, 0.7f};
  if (name == "event") return {5.0f, 0.0f, 0.3f};
  if (name == "large") return {1.0f, 0.0f, 0.7f};
  throw ConfigError("unknown teacher preset '" + name +
                    "' (expected static, event or large)");
}

Aggregated aggregate_output(Tape& tape, const Tensor& q) {
  const Dims d = TemporalDims(q, "aggregate_output");
  if (d.t == 0) throw ParameterError("aggregate_output needs T >= 1");
  Tensor v = ops::softmax(tape, q, 1.0f);
  Tensor o = ops::mean_axis0(tape, v);
  return {v, o};
}

std::vector<std::vector<std::size_t>> select_teachers(
    const Tensor& v, std::span<const int> labels, std::size_t k) {
  const Dims d = TemporalDims(v, "select_teachers");
  if (k < 1 || k > d.t) {
    throw ParameterError("teacher count k=" + std::to_string(k) +
                         " must lie in [1, T=" + std::to_string(d.t) + "]");
  }
  CheckLabels(labels, d.b, d.c);
  std::span<const float> p = v.data();
  std::vector<std::vector<std::size_t>> selected(d.b);
  std::vector<std::size_t> order(d.t);
  for (std::size_t b = 0; b < d.b; ++b) {
    const std::size_t y = static_cast<std::size_t>(labels[b]);
    auto prob = [&](std::size_t t) { return p[(t * d.b + b) * d.c + y]; };
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t c) {
                       return prob(a) > prob(c);
                     });
    selected[b].assign(order.begin(), order.begin() + k);
  }
  return selected;
}

TeacherSignal teacher_signal(const Tensor& q,
                             std::vector<std::vector<std::size_t>> selected,
                             float tau) {
  const Dims d = TemporalDims(q, "teacher_signal");
  if (selected.size() != d.b) {
    throw DimensionError("teacher_signal: " + std::to_string(selected.size()) +
                         " selections for a batch of " + std::to_string(d.b));
  }
  std::vector<float> mean_logits(d.b * d.c, 0.0f);
  std::span<const float> qd = q.data();
  for (std::size_t b = 0; b < d.b; ++b) {
    if (selected[b].empty()) {
      throw ContractError("teacher_signal: empty selection for sample " +
                          std::to_string(b));
    }
    // Sum in ascending time order so the result does not depend on ranking.
    std::vector<std::size_t> ts = selected[b];
    std::sort(ts.begin(), ts.end());
    float* row = mean_logits.data() + b * d.c;
    for (std::size_t t : ts) {
      if (t >= d.t) {
        throw ParameterError("teacher_signal: timestep " + std::to_string(t) +
                             " out of range for T=" + std::to_string(d.t));
      }
      const float* src = qd.data() + (t * d.b + b) * d.c;
      for (std::size_t c = 0; c < d.c; ++c) row[c] += src[c];
    }
    const float inv = 1.0f / static_cast<float>(ts.size());
    for (std::size_t c = 0; c < d.c; ++c) row[c] *= inv;
  }
  Tape detached = Tape::inference();
  Tensor z = ops::softmax(detached, Tensor::from({d.b, d.c}, std::move(mean_logits)),
                          tau);
  return TeacherSignal{z, std::move(selected)};
}

Tensor tks_loss(Tape& tape, const Tensor& v, const TeacherSignal& z) {
  const Dims d = TemporalDims(v, "tks_loss");
  if (z.z.shape() != Shape{d.b, d.c}) {
    throw DimensionError("tks_loss: teacher " + shape_string(z.z.shape()) +
                         " does not match outputs " + shape_string(v.shape()));
  }
  std::vector<float> tiled;
  tiled.reserve(v.numel());
  for (std::size_t t = 0; t < d.t; ++t) {
    tiled.insert(tiled.end(), z.z.data().begin(), z.z.data().end());
  }
  return CrossEntropy(tape, v, Tensor::from(v.shape(), std::move(tiled)),
                      d.t * d.b);
}

Tensor ce_loss(Tape& tape, const Tensor& v, std::span<const int> labels) {
  const Dims d = TemporalDims(v, "ce_loss");
  CheckLabels(labels, d.b, d.c);
  Tensor o = ops::mean_axis0(tape, v);
  return CrossEntropy(tape, o, Targets(labels, d.c, 1.0f, 0.0f, 0), d.b);
}

Tensor final_loss(Tape& tape, const Tensor& l_ce, const Tensor& l_tks,
                  float alpha, float tau) {
  if (!(alpha >= 0.0f && alpha <= 1.0f)) {
    throw ParameterError("alpha must lie in [0, 1], got " +
                         std::to_string(alpha));
  }
  if (!(tau > 0.0f)) {
    throw ParameterError("tau must be positive, got " + std::to_string(tau));
  }
  return ops::add(tape, ops::scale(tape, l_ce, 1.0f - alpha),
                  ops::scale(tape, l_tks, alpha * tau * tau));
}

double final_loss(double l_ce, double l_tks, double alpha, double tau) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " +
                         std::to_string(alpha));
  }
  if (!(tau > 0.0)) {
    throw ParameterError("tau must be positive, got " + std::to_string(tau));
  }
  return (1.0 - alpha) * l_ce + alpha * tau * tau * l_tks;
}

double sub_model_loss(std::size_t t, double l_ce, const Tensor& v,
                      const TeacherSignal& z, double alpha, double tau,
                      std::size_t T) {
  const Dims d = TemporalDims(v, "sub_model_loss");
  if (t >= d.t || T != d.t) {
    throw ParameterError("sub_model_loss: timestep " + std::to_string(t) +
                         " invalid for T=" + std::to_string(T));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ParameterError("alpha must lie in [0, 1], got " +
                         std::to_string(alpha));
  }
  std::span<const float> p = v.data();
  std::span<const float> zd = z.z.data();
  double ce = 0.0;
  for (std::size_t b = 0; b < d.b; ++b) {
    for (std::size_t c = 0; c < d.c; ++c) {
      const float pv = std::max(p[(t * d.b + b) * d.c + c], ops::kLogFloor);
      ce -= static_cast<double>(zd[b * d.c + c]) * std::log(static_cast<double>(pv));
    }
  }
  ce /= static_cast<double>(d.b);
  return (1.0 - alpha) * l_ce / static_cast<double>(T) + alpha * tau * tau * ce;
}

float alpha_at(std::size_t epoch, const AlphaSchedule& sched) {
  if (epoch >= sched.total_epochs) {
    throw ParameterError("epoch " + std::to_string(epoch) +
                         " outside schedule of " +
                         std::to_string(sched.total_epochs) + " epochs");
  }
  if (sched.total_epochs == 1) return sched.alpha_end;
  const double frac = static_cast<double>(epoch) /
                      static_cast<double>(sched.total_epochs - 1);
  return static_cast<float>(sched.alpha_start +
                            (static_cast<double>(sched.alpha_end) -
                             sched.alpha_start) * frac);
}

Tensor baseline_loss(Tape& tape, TeacherMode mode, const Tensor& v,
                     std::span<const int> labels, float epsilon) {
  const Dims d = TemporalDims(v, "baseline_loss");
  switch (mode) {
    case TeacherMode::kNone:
      return ce_loss(tape, v, labels);
    case TeacherMode::kLabelSmoothing: {
      if (!(epsilon >= 0.0f && epsilon < 1.0f)) {
        throw ParameterError("label smoothing epsilon must lie in [0, 1)");
      }
      CheckLabels(labels, d.b, d.c);
      const float off = epsilon / static_cast<float>(d.c);
      const float on = (1.0f - epsilon) + off;
      Tensor o = ops::mean_axis0(tape, v);
      return CrossEntropy(tape, o, Targets(labels, d.c, on, off, 0), d.b);
    }
    case TeacherMode::kPerTimestepLabels:
      CheckLabels(labels, d.b, d.c);
      return CrossEntropy(tape, v, Targets(labels, d.c, 1.0f, 0.0f, d.t),
                          d.t * d.b);
    case TeacherMode::kTks:
      break;
  }
  throw ConfigError("baseline_loss does not handle mode '" + to_string(mode) +
                    "'");
}

StepLoss compute_step_loss(Tape& tape, const Tensor& q, const Tensor& v,
                           std::span<const int> labels,
                           const TeacherConfig& cfg, float alpha) {
  const Dims d = TemporalDims(v, "compute_step_loss");
  StepLoss out;
  LossBreakdown& parts = out.parts;
  parts.l_sub.assign(d.t, 0.0);

  if (cfg.mode == TeacherMode::kTks) {
    Tensor l_ce = ce_loss(tape, v, labels);
    TeacherSignal z =
        teacher_signal(q, select_teachers(v, labels, cfg.k), cfg.tau);
    Tensor l_tks = tks_loss(tape, v, z);
    out.loss = final_loss(tape, l_ce, l_tks, alpha, cfg.tau);
    parts.alpha = alpha;
    parts.l_ce = l_ce.item();
    parts.l_tks = l_tks.item();
    parts.l_final = out.loss.item();
    for (std::size_t t = 0; t < d.t; ++t) {
      parts.l_sub[t] =
          sub_model_loss(t, parts.l_ce, v, z, alpha, cfg.tau, d.t);
    }
    return out;
  }

  // Comparison modes optimize their label loss alone; the teacher fit is
  // still reported so runs can be compared on it.
  out.loss = baseline_loss(tape, cfg.mode, v, labels, cfg.epsilon);
  parts.alpha = 0.0;
  parts.l_ce = out.loss.item();
  parts.l_final = parts.l_ce;
  {
    Tape detached = Tape::inference();
    const std::size_t k = std::min(cfg.k, d.t);
    TeacherSignal z = teacher_signal(q, select_teachers(v, labels, k), cfg.tau);
    parts.l_tks = tks_loss(detached, v, z).item();
  }
  for (std::size_t t = 0; t < d.t; ++t) {
    parts.l_sub[t] = parts.l_ce / static_cast<double>(d.t);
  }
  return out;
}

}  // namespace tks
