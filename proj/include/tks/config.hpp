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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tks/lif.hpp"
#include "tks/optimizer.hpp"
#include "tks/surrogate.hpp"
#include "tks/tks_core.hpp"

namespace tks {

struct ModelConfig {
  std::string arch = "mlp-small";
  std::size_t hidden = 128;
};

struct ScheduleConfig {
  float lr_max = 1e-3f;
  float lr_min = 0.0f;
  float alpha_start = 0.0f;
  float alpha_end = 0.7f;
};

// Where the train and test splits come from. Only the fields of the chosen
// kind are read.
struct DataConfig {
  std::string kind = "synthetic";  // synthetic, idx, events, raw

  std::size_t n_per_class = 128;
  std::size_t n_test_per_class = 64;
  std::size_t classes = 4;
  std::size_t block_width = 8;
  float noise_sigma = 0.1f;
  float amplitude = 1.0f;
  std::uint64_t seed = 0;

  std::string train_images, train_labels, test_images, test_labels;

  std::string train_manifest, test_manifest;
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint32_t cap = 0;

  std::string train_prefix, test_prefix;
};

struct RunSection {
  std::size_t T_train = 10;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  std::string out_dir = "runs/default";
};

// The full experiment description. JSON layout:
//   { "preset": ..., "model": {...}, "lif": {...}, "surrogate": {...},
//     "teacher": {...}, "schedule": {...}, "optimizer": {...},
//     "data": {...}, "run": {...} }
struct RunConfig {
  std::string preset = "desk";
  ModelConfig model;
  LifConfig lif;
  SurrogateSpec surrogate;
  TeacherConfig teacher;
  ScheduleConfig schedule;
  OptimizerConfig optimizer;
  DataConfig data;
  RunSection run;

  void validate() const;
  AlphaSchedule alpha_schedule() const;
};

// desk: batch 32, 30 epochs, tau 3, alpha 0 -> 0.7, AdamW wd 0.01.
// event: desk with tau 5, alpha 0 -> 0.3.
// large: tau 1, alpha 0 -> 0.7, plain Adam without weight decay.
// paper: desk with batch 128.
RunConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

nlohmann::json to_json(const RunConfig& cfg);
// Strict: every key must exist in the schema and have the schema's type.
RunConfig run_config_from_json(const nlohmann::json& doc);

// Applies one "section.key=value" assignment, parsing value as the type the
// key already has in doc. Unknown keys throw ConfigError.
void apply_override(nlohmann::json& doc, const std::string& assignment);

// Preset defaults, then the file (if any), then overrides, then validate().
// A "preset" key in the file or overrides selects the defaults.
RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const std::vector<std::string>& overrides);
RunConfig resolve_config_doc(nlohmann::json doc, const std::vector<std::string>& overrides);

// The parts of the config that determine training, without output paths.
nlohmann::json provenance_json(const RunConfig& cfg);

// The double whose shortest decimal form is that of the float, so JSON shows
// 0.1 rather than 0.10000000149011612. Converts back to the same float.
double json_number(float value);

nlohmann::json lif_to_json(const LifConfig& cfg);
LifConfig lif_from_json(const nlohmann::json& doc);
nlohmann::json surrogate_to_json(const SurrogateSpec& spec);
SurrogateSpec surrogate_from_json(const nlohmann::json& doc);

}  // namespace tks
