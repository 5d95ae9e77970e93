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

#include "tks/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "tks/error.hpp"
#include "tks/tape.hpp"

namespace tks {
namespace {

void CheckRows(const Tensor& o, std::span<const int> labels, const char* what) {
  if (o.rank() != 2 || o.dim(0) != labels.size()) {
    throw DimensionError(std::string(what) + ": outputs " + shape_string(o.shape()) +
                         " do not match " + std::to_string(labels.size()) + " labels");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= o.dim(1)) {
      throw DataError(std::string(what) + ": label " + std::to_string(y) +
                      " outside [0, " + std::to_string(o.dim(1)) + ")");
    }
  }
}

std::vector<std::size_t> Predictions(const Tensor& o) {
  const std::size_t b = o.dim(0), c = o.dim(1);
  std::vector<std::size_t> pred(b);
  for (std::size_t i = 0; i < b; ++i) pred[i] = argmax(o.data().subspan(i * c, c));
  return pred;
}

}  // namespace

std::size_t argmax(std::span<const float> row) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < row.size(); ++j) {
    if (row[j] > row[best]) best = j;
  }
  return best;
}

double top1_accuracy(const Tensor& o, std::span<const int> labels) {
  CheckRows(o, labels, "top1_accuracy");
  if (labels.empty()) return 0.0;
  const std::vector<std::size_t> pred = Predictions(o);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    hits += pred[i] == static_cast<std::size_t>(labels[i]);
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double aurc(std::span<const float> confidence, std::span<const std::uint8_t> correct) {
  if (confidence.size() != correct.size()) {
    throw DimensionError("aurc: " + std::to_string(confidence.size()) +
                         " confidences for " + std::to_string(correct.size()) +
                         " outcomes");
  }
  if (confidence.empty()) throw ParameterError("aurc needs at least one sample");
  std::vector<std::size_t> order(confidence.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidence[a] > confidence[b];
  });
  std::size_t errors = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    errors += correct[order[i]] ? 0 : 1;
    total += static_cast<double>(errors) / static_cast<double>(i + 1);
  }
  return total / static_cast<double>(order.size());
}

std::vector<double> per_timestep_accuracy(const Tensor& v, std::span<const int> labels) {
  if (v.rank() != 3) {
    throw DimensionError("per_timestep_accuracy: expected [T, B, C], got " +
                         shape_string(v.shape()));
  }
  const std::size_t T = v.dim(0), b = v.dim(1), c = v.dim(2);
  std::vector<double> acc(T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<float> slice(v.data().begin() + t * b * c,
                             v.data().begin() + (t + 1) * b * c);
    acc[t] = top1_accuracy(Tensor::from({b, c}, std::move(slice)), labels);
  }
  return acc;
}

std::vector<std::optional<double>> per_class_accuracy(const Tensor& o,
                                                      std::span<const int> labels,
                                                      std::size_t classes) {
  const auto confusion = confusion_matrix(o, labels, classes);
  std::vector<std::optional<double>> acc(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const std::size_t n =
        std::accumulate(confusion[k].begin(), confusion[k].end(), std::size_t{0});
    if (n > 0) acc[k] = static_cast<double>(confusion[k][k]) / static_cast<double>(n);
  }
  return acc;
}

std::vector<std::vector<std::size_t>> confusion_matrix(const Tensor& o,
                                                       std::span<const int> labels,
                                                       std::size_t classes) {
  CheckRows(o, labels, "confusion_matrix");
  if (o.dim(1) != classes) {
    throw DimensionError("confusion_matrix: outputs have " + std::to_string(o.dim(1)) +
                         " classes, expected " + std::to_string(classes));
  }
  std::vector<std::vector<std::size_t>> counts(classes, std::vector<std::size_t>(classes));
  const std::vector<std::size_t> pred = Predictions(o);
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[labels[i]][pred[i]];
  return counts;
}

EvalReport make_report(const Tensor& v, const Tensor& o, std::span<const int> labels,
                       std::size_t classes) {
  EvalReport r;
  r.T = v.dim(0);
  r.samples = labels.size();
  r.top1 = top1_accuracy(o, labels);
  const std::size_t c = o.dim(1);
  std::vector<float> conf(labels.size());
  std::vector<std::uint8_t> correct(labels.size());
  const std::vector<std::size_t> pred = Predictions(o);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    conf[i] = o.data()[i * c + pred[i]];
    correct[i] = pred[i] == static_cast<std::size_t>(labels[i]);
  }
  r.aurc = labels.empty() ? 0.0 : aurc(conf, correct) * 1e3;
  r.per_timestep_acc = per_timestep_accuracy(v, labels);
  r.per_class_acc = per_class_accuracy(o, labels, classes);
  r.confusion = confusion_matrix(o, labels, classes);
  return r;
}

EvalReport evaluate(const Model& model, const Dataset& data, std::size_t T,
                    std::size_t batch_size) {
  if (T == 0) throw ParameterError("evaluate needs T >= 1");
  if (batch_size == 0) throw ParameterError("evaluate needs batch_size >= 1");
  data.validate();
  const Dataset encoded = data.streams.empty() ? data : data.with_steps(T);
  const std::size_t n = encoded.size();
  const std::size_t c = model.spec().classes;
  if (encoded.class_count > c) {
    throw DimensionError("dataset has " + std::to_string(encoded.class_count) +
                         " classes, model predicts " + std::to_string(c));
  }
  std::vector<float> v_all(T * n * c);
  std::vector<float> o_all(n * c);
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t b = std::min(batch_size, n - start);
    idx.resize(b);
    std::iota(idx.begin(), idx.end(), start);
    Tape tape = Tape::inference();
    const TemporalOutput out = model.unroll(tape, encoded.batch_inputs(idx, T));
    for (std::size_t t = 0; t < T; ++t) {
      std::copy_n(out.v.data().begin() + t * b * c, b * c,
                  v_all.begin() + (t * n + start) * c);
    }
    std::copy_n(out.o.data().begin(), b * c, o_all.begin() + start * c);
  }
  return make_report(Tensor::from({T, n, c}, std::move(v_all)),
                     Tensor::from({n, c}, std::move(o_all)), encoded.labels, c);
}

std::map<std::size_t, EvalReport> timestep_sweep(const Model& model,
                                                 const Dataset& data,
                                                 std::span<const std::size_t> t_values,
                                                 std::size_t batch_size) {
  std::map<std::size_t, EvalReport> out;
  for (std::size_t T : t_values) {
    if (T == 0) throw ParameterError("timestep sweep values must be >= 1");
    out.emplace(T, evaluate(model, data, T, batch_size));
  }
  return out;
}

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& a : r.per_class_acc) {
    per_class.push_back(a ? nlohmann::json(*a) : nlohmann::json(nullptr));
  }
  return {{"T", r.T},
          {"samples", r.samples},
          {"top1", r.top1},
          {"aurc", r.aurc},
          {"per_timestep_acc", r.per_timestep_acc},
          {"per_class_acc", per_class},
          {"confusion", r.confusion}};
}

std::string sweep_csv(const std::map<std::size_t, EvalReport>& sweep) {
  std::string out = "T_test,top1,aurc\n";
  char line[96];
  for (const auto& [T, r] : sweep) {
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f\n", T, r.top1, r.aurc);
    out += line;
  }
  return out;
}

}  // namespace tks
