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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tks/checkpoint.hpp"
#include "tks/config.hpp"
#include "tks/data.hpp"
#include "tks/network.hpp"
#include "tks/optimizer.hpp"

namespace tks {

struct DataSplits {
  Dataset train;
  Dataset test;
};

// Loads or synthesizes both splits described by cfg. Synthetic data uses
// run.T_train steps; the test split draws from a seed derived from data.seed.
DataSplits load_data(const RunConfig& cfg);

ModelSpec model_spec(const RunConfig& cfg, const Dataset& train);

struct EpochReport {
  std::size_t epoch = 0;
  float lr = 0.0f;
  float alpha = 0.0f;
  double l_ce = 0.0;
  double l_tks = 0.0;
  double l_final = 0.0;
  double train_acc = 0.0;
  double wall_ms = 0.0;
};

nlohmann::json to_json(const EpochReport& r);

// Per-epoch shuffle order, seeded by (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                     std::size_t epoch);

// One pass over the training split. Sets the optimizer's learning rate for
// this epoch, then for every mini-batch: unroll, build the loss, backward,
// optimizer step. Throws TrainingError on a non-finite loss.
EpochReport train_epoch(const Model& model, OptimizerState& opt,
                        const Dataset& data, const RunConfig& cfg,
                        std::size_t epoch);

struct FitOptions {
  std::optional<std::string> resume;  // checkpoint to continue from
  std::optional<std::size_t> max_epochs;  // stop early, as if interrupted
  bool write_files = true;            // metrics.jsonl, checkpoint, config
  std::function<void(const EpochReport&)> on_epoch;
};

struct FitResult {
  Checkpoint checkpoint;
  std::vector<EpochReport> history;
  DataSplits data;
};

// Trains for run.epochs epochs. With write_files, <out_dir> receives
// resolved_config.json, metrics.jsonl (one record per epoch) and model.ckpt.
FitResult fit(const RunConfig& cfg, const FitOptions& options = {});

}  // namespace tks
