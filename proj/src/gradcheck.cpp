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

#include "tks/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tks/error.hpp"
#include "tks/network.hpp"
#include "tks/ops.hpp"
#include "tks/tks_core.hpp"

namespace tks {
namespace {

Tensor Random(Shape shape, std::mt19937_64& rng, float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> values(shape_numel(shape));
  for (float& v : values) v = dist(rng);
  return Tensor::from(std::move(shape), std::move(values), true);
}

double Project(const Tensor& out, const std::vector<float>& r) {
  double acc = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    acc += static_cast<double>(out.data()[i]) * static_cast<double>(r[i]);
  }
  return acc;
}

std::size_t SpikeMismatches(std::mt19937_64& rng) {
  std::size_t bad = 0;
  for (SurrogateKind kind : {SurrogateKind::kRectangular, SurrogateKind::kTriangular,
                             SurrogateKind::kPiecewiseQuadratic}) {
    const SurrogateSpec spec{kind, 0.75f};
    const float v_th = 0.5f;
    Tensor v = Random({64}, rng, -1.0f, 2.0f);
    Tensor g = Random({64}, rng);
    g.set_requires_grad(false);
    Tape tape;
    Tensor s = ops::spike(tape, v, v_th, spec);
    tape.backward(ops::sum(tape, ops::mul(tape, s, g)));
    for (std::size_t i = 0; i < 64; ++i) {
      const float expected = g.at(i) * spec.derivative(v.at(i) - v_th);
      const float forward = v.at(i) >= v_th ? 1.0f : 0.0f;
      bad += (v.grad()[i] != expected) || (s.at(i) != forward);
    }
  }
  return bad;
}

}  // namespace

double max_gradient_error(const GradForward& forward, const std::vector<Tensor>& inputs,
                          std::uint64_t seed, float step, double floor) {
  std::mt19937_64 rng(seed);
  std::vector<float> r;
  {
    Tape probe = Tape::inference();
    const Tensor out = forward(probe, inputs);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    r.resize(out.numel());
    for (float& x : r) x = dist(rng);
  }
  for (Tensor in : inputs) in.clear_grad();
  Tape tape;
  const Tensor out = forward(tape, inputs);
  const Tensor proj = Tensor::from(out.shape(), r);
  tape.backward(ops::sum(tape, ops::mul(tape, out, proj)));

  double worst = 0.0;
  for (const Tensor& in_const : inputs) {
    if (!in_const.requires_grad()) continue;
    Tensor in = in_const;
    const std::vector<float> analytic(in.grad().begin(), in.grad().end());
    std::span<float> x = in.mutable_data();
    for (std::size_t i = 0; i < x.size(); ++i) {
      const float saved = x[i];
      x[i] = saved + step;
      const float hi_x = x[i];
      Tape t1 = Tape::inference();
      const double hi = Project(forward(t1, inputs), r);
      x[i] = saved - step;
      const float lo_x = x[i];
      Tape t2 = Tape::inference();
      const double lo = Project(forward(t2, inputs), r);
      x[i] = saved;
      const double numeric = (hi - lo) / (static_cast<double>(hi_x) - lo_x);
      const double a = analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    in.clear_grad();
  }
  return worst;
}

GradcheckReport run_gradcheck(std::size_t seeds, std::uint64_t base_seed) {
  struct Case {
    std::string name;
    std::function<std::vector<Tensor>(std::mt19937_64&)> make;
    GradForward forward;
  };
  const kernels::LifCoeffs lif{0.5f, 0.5f, 0.1f};
  std::vector<Case> cases{
      {"matmul", [](auto& g) { return std::vector{Random({3, 4}, g), Random({4, 5}, g)}; },
       [](Tape& t, const auto& in) { return ops::matmul(t, in[0], in[1]); }},
      {"add", [](auto& g) { return std::vector{Random({2, 5}, g), Random({2, 5}, g)}; },
       [](Tape& t, const auto& in) { return ops::add(t, in[0], in[1]); }},
      {"sub", [](auto& g) { return std::vector{Random({2, 5}, g), Random({2, 5}, g)}; },
       [](Tape& t, const auto& in) { return ops::sub(t, in[0], in[1]); }},
      {"mul", [](auto& g) { return std::vector{Random({2, 5}, g), Random({2, 5}, g)}; },
       [](Tape& t, const auto& in) { return ops::mul(t, in[0], in[1]); }},
      {"scale", [](auto& g) { return std::vector{Random({7}, g)}; },
       [](Tape& t, const auto& in) { return ops::scale(t, in[0], -1.75f); }},
      {"linear",
       [](auto& g) { return std::vector{Random({3, 4}, g), Random({4, 2}, g), Random({2}, g)}; },
       [](Tape& t, const auto& in) { return ops::linear(t, in[0], in[1], in[2]); }},
      {"sum", [](auto& g) { return std::vector{Random({3, 3}, g)}; },
       [](Tape& t, const auto& in) { return ops::sum(t, in[0]); }},
      {"mean", [](auto& g) { return std::vector{Random({3, 3}, g)}; },
       [](Tape& t, const auto& in) { return ops::mean(t, in[0]); }},
      {"log", [](auto& g) { return std::vector{Random({8}, g, 0.5f, 2.0f)}; },
       [](Tape& t, const auto& in) { return ops::log(t, in[0]); }},
      {"softmax", [](auto& g) { return std::vector{Random({3, 4}, g, -2.0f, 2.0f)}; },
       [](Tape& t, const auto& in) { return ops::softmax(t, in[0], 1.0f); }},
      {"softmax_tau", [](auto& g) { return std::vector{Random({3, 4}, g, -2.0f, 2.0f)}; },
       [](Tape& t, const auto& in) { return ops::softmax(t, in[0], 3.0f); }},
      {"mean_axis0", [](auto& g) { return std::vector{Random({4, 2, 3}, g)}; },
       [](Tape& t, const auto& in) { return ops::mean_axis0(t, in[0]); }},
      {"stack_select",
       [](auto& g) { return std::vector{Random({2, 3}, g), Random({2, 3}, g)}; },
       [](Tape& t, const auto& in) {
         Tensor s = ops::stack(t, in);
         return ops::mul(t, ops::select(t, s, 1), ops::select(t, s, 0));
       }},
      {"reshape", [](auto& g) { return std::vector{Random({2, 6}, g)}; },
       [](Tape& t, const auto& in) {
         return ops::mul(t, ops::reshape(t, in[0], {3, 4}), ops::reshape(t, in[0], {3, 4}));
       }},
      {"lif_update",
       [](auto& g) {
         return std::vector{Random({2, 3}, g), Random({2, 3}, g, 0.0f, 1.0f),
                            Random({2, 3}, g)};
       },
       [lif](Tape& t, const auto& in) {
         return ops::lif_update(t, in[0], in[1], in[2], lif, false);
       }},
      {"conv2d",
       [](auto& g) {
         return std::vector{Random({2, 2, 5, 5}, g), Random({3, 2, 3, 3}, g),
                            Random({3}, g)};
       },
       [](Tape& t, const auto& in) { return ops::conv2d(t, in[0], in[1], in[2], 1, 1); }},
      {"conv2d_stride",
       [](auto& g) {
         return std::vector{Random({1, 2, 6, 6}, g), Random({2, 2, 3, 3}, g),
                            Random({2}, g)};
       },
       [](Tape& t, const auto& in) { return ops::conv2d(t, in[0], in[1], in[2], 2, 0); }},
      {"avg_pool2d", [](auto& g) { return std::vector{Random({2, 2, 4, 5}, g)}; },
       [](Tape& t, const auto& in) { return ops::avg_pool2d(t, in[0], 2); }},
      {"ce_loss", [](auto& g) { return std::vector{Random({4, 3, 5}, g, -2.0f, 2.0f)}; },
       [](Tape& t, const auto& in) {
         const std::vector<int> labels{0, 3, 1};
         return ce_loss(t, aggregate_output(t, in[0]).v, labels);
       }},
  };
  // tks_loss against a teacher held fixed, as training sees it.
  const TeacherSignal fixed_z{
      Tensor::from({3, 5}, {0.1f, 0.2f, 0.3f, 0.25f, 0.15f, 0.6f, 0.1f, 0.1f, 0.1f, 0.1f,
                            0.05f, 0.05f, 0.8f, 0.05f, 0.05f}),
      {{0}, {1}, {2}}};
  cases.push_back({"tks_final_loss",
                   [](auto& g) { return std::vector{Random({4, 3, 5}, g, -2.0f, 2.0f)}; },
                   [fixed_z](Tape& t, const auto& in) {
                     const std::vector<int> labels{0, 3, 1};
                     Aggregated agg = aggregate_output(t, in[0]);
                     return final_loss(t, ce_loss(t, agg.v, labels),
                                       tks_loss(t, agg.v, fixed_z), 0.4f, 3.0f);
                   }});

  GradcheckReport report;
  std::mt19937_64 spike_rng(base_seed);
  for (std::size_t s = 0; s < seeds; ++s) report.spike_mismatches += SpikeMismatches(spike_rng);

  auto record = [&](const std::string& name, double err) {
    auto it = std::find_if(report.cases.begin(), report.cases.end(),
                           [&](const GradcheckCase& c) { return c.name == name; });
    if (it == report.cases.end()) {
      report.cases.push_back({name, err});
    } else {
      it->max_rel_error = std::max(it->max_rel_error, err);
    }
    report.max_rel_error = std::max(report.max_rel_error, err);
  };

  for (std::size_t s = 0; s < seeds; ++s) {
    for (const Case& c : cases) {
      std::mt19937_64 rng(base_seed + 1000 * s + std::hash<std::string>{}(c.name) % 997);
      const std::vector<Tensor> inputs = c.make(rng);
      record(c.name, max_gradient_error(c.forward, inputs, rng()));
    }

    // mlp-small readout under the combined loss. Hidden weights sit behind
    // the spike threshold, which finite differences cannot see through.
    ModelSpec spec;
    spec.input_shape = {6};
    spec.classes = 3;
    spec.hidden = 8;
    const Model model = Model::build(spec, base_seed + s);
    std::mt19937_64 rng(base_seed + 77 + s);
    const Tensor x = [&] {
      Tensor t = Random({4, 3, 6}, rng, 0.0f, 3.0f);
      t.set_requires_grad(false);
      return t;
    }();
    const std::vector<int> labels{2, 0, 1};
    TeacherSignal z;
    {
      Tape t = Tape::inference();
      const TemporalOutput out = model.unroll(t, x);
      z = teacher_signal(out.q, select_teachers(out.v, labels, 2), 3.0f);
    }
    for (Tensor p : model.parameters()) p.set_requires_grad(false);
    Tensor w = model.readout().weight;
    Tensor b = model.readout().bias;
    w.set_requires_grad(true);
    b.set_requires_grad(true);
    const GradForward net = [&](Tape& t, const std::vector<Tensor>&) {
      const TemporalOutput out = model.unroll(t, x);
      return final_loss(t, ce_loss(t, out.v, labels), tks_loss(t, out.v, z), 0.4f, 3.0f);
    };
    record("mlp_small_readout", max_gradient_error(net, {w, b}, rng()));
  }
  return report;
}

}  // namespace tks
