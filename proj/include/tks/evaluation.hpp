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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tks/data.hpp"
#include "tks/network.hpp"
#include "tks/tensor.hpp"

namespace tks {

// Index of the largest entry; ties go to the smaller index.
std::size_t argmax(std::span<const float> row);

// Fraction of rows of o [B, C] whose argmax equals the label.
double top1_accuracy(const Tensor& o, std::span<const int> labels);

// Area under the risk-coverage curve in [0, 1]: samples sorted by confidence
// (descending, ties by index), risk at coverage i is the error rate of the
// first i samples, averaged over i = 1..B.
double aurc(std::span<const float> confidence, std::span<const std::uint8_t> correct);

// top1_accuracy of every v[t] of a [T, B, C] tensor.
std::vector<double> per_timestep_accuracy(const Tensor& v, std::span<const int> labels);

// Accuracy within each class; nullopt for classes with no samples.
std::vector<std::optional<double>> per_class_accuracy(const Tensor& o,
                                                      std::span<const int> labels,
                                                      std::size_t classes);

// counts[true][predicted]
std::vector<std::vector<std::size_t>> confusion_matrix(const Tensor& o,
                                                       std::span<const int> labels,
                                                       std::size_t classes);

struct EvalReport {
  std::size_t T = 0;
  std::size_t samples = 0;
  double top1 = 0.0;
  double aurc = 0.0;  // x 1e3
  std::vector<double> per_timestep_acc;
  std::vector<std::optional<double>> per_class_acc;
  std::vector<std::vector<std::size_t>> confusion;
};

// Report built from already computed outputs: v [T, B, C], o [B, C].
EvalReport make_report(const Tensor& v, const Tensor& o, std::span<const int> labels,
                       std::size_t classes);

// Runs the model for exactly T steps from reset states on every sample.
// Event datasets are re-binned at T; other temporal data uses frame t mod
// its stored length; static data repeats each step.
EvalReport evaluate(const Model& model, const Dataset& data, std::size_t T,
                    std::size_t batch_size = 256);

std::map<std::size_t, EvalReport> timestep_sweep(const Model& model,
                                                 const Dataset& data,
                                                 std::span<const std::size_t> t_values,
                                                 std::size_t batch_size = 256);

nlohmann::json to_json(const EvalReport& report);
// "T_test,top1,aurc" header plus one row per entry.
std::string sweep_csv(const std::map<std::size_t, EvalReport>& sweep);

}  // namespace tks
