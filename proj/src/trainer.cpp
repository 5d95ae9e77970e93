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

#include "tks/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "tks/error.hpp"
#include "tks/evaluation.hpp"
#include "tks/tape.hpp"
#include "tks/tks_core.hpp"

namespace tks {
namespace {

constexpr std::uint64_t kTestSeedOffset = 0x9E3779B97F4A7C15ull;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path.string(),
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

bool SameShapeContract(const ModelSpec& a, const ModelSpec& b) {
  return a.preset == b.preset && a.input_shape == b.input_shape &&
         a.classes == b.classes && (a.preset != "mlp-small" || a.hidden == b.hidden);
}

}  // namespace

DataSplits load_data(const RunConfig& cfg) {
  const DataConfig& d = cfg.data;
  DataSplits s;
  if (d.kind == "synthetic") {
    SynthSpec spec{d.n_per_class, cfg.run.T_train, d.classes, d.noise_sigma,
                   d.seed,        d.block_width,   d.amplitude};
    s.train = synth_temporal(spec);
    spec.n_per_class = d.n_test_per_class;
    spec.seed = d.seed + kTestSeedOffset;
    s.test = synth_temporal(spec);
    s.train.split = "train";
    s.test.split = "test";
  } else if (d.kind == "idx") {
    s.train = load_idx(d.train_images, d.train_labels);
    s.test = load_idx(d.test_images, d.test_labels);
  } else if (d.kind == "events") {
    s.train = load_event_dataset(d.train_manifest, d.width, d.height, cfg.run.T_train, d.cap);
    s.test = load_event_dataset(d.test_manifest, d.width, d.height, cfg.run.T_train, d.cap);
  } else if (d.kind == "raw") {
    s.train = read_raw_dataset(d.train_prefix);
    s.test = read_raw_dataset(d.test_prefix);
  } else {
    throw ConfigError("data.kind '" + d.kind + "' is not synthetic, idx, events or raw");
  }
  const std::size_t classes = std::max(s.train.class_count, s.test.class_count);
  s.train.class_count = s.test.class_count = classes;
  s.train.validate();
  s.test.validate();
  if (s.train.frame_shape() != s.test.frame_shape()) {
    throw DataError("train frames " + shape_string(s.train.frame_shape()) +
                    " differ from test frames " + shape_string(s.test.frame_shape()));
  }
  return s;
}

ModelSpec model_spec(const RunConfig& cfg, const Dataset& train) {
  ModelSpec spec;
  spec.preset = cfg.model.arch;
  spec.input_shape = train.frame_shape();
  spec.classes = train.class_count;
  spec.hidden = cfg.model.hidden;
  spec.lif = cfg.lif;
  spec.surrogate = cfg.surrogate;
  return spec;
}

nlohmann::json to_json(const EpochReport& r) {
  return {{"epoch", r.epoch},     {"lr", r.lr},           {"alpha", r.alpha},
          {"l_ce", r.l_ce},       {"l_tks", r.l_tks},     {"l_final", r.l_final},
          {"train_acc", r.train_acc}, {"wall_ms", r.wall_ms}};
}

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed,
                                     std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(epoch)};
  std::mt19937_64 rng(seq);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

EpochReport train_epoch(const Model& model, OptimizerState& opt, const Dataset& data,
                        const RunConfig& cfg, std::size_t epoch) {
  const auto start = std::chrono::steady_clock::now();
  if (data.size() == 0) throw DataError("training split is empty");
  if (model.spec().input_shape != data.frame_shape()) {
    throw DimensionError("model input " + shape_string(model.spec().input_shape) +
                         " does not match data frames " +
                         shape_string(data.frame_shape()));
  }
  const std::size_t total = std::max<std::size_t>(cfg.run.epochs, 1);
  EpochReport report;
  report.epoch = epoch;
  report.lr = cosine_lr(epoch, total, cfg.schedule.lr_max, cfg.schedule.lr_min);
  const float alpha = alpha_at(epoch, cfg.alpha_schedule());
  opt.lr = report.lr;

  const std::vector<std::size_t> order = epoch_order(data.size(), cfg.run.seed, epoch);
  std::vector<Tensor> params = model.parameters();
  std::size_t batches = 0, hits = 0;
  double alpha_logged = 0.0;
  for (std::size_t first = 0; first < order.size(); first += cfg.run.batch_size) {
    const std::size_t b = std::min(cfg.run.batch_size, order.size() - first);
    const std::span<const std::size_t> idx(order.data() + first, b);
    const std::vector<int> labels = data.batch_labels(idx);
    Tape tape;
    const TemporalOutput out = model.unroll(tape, data.batch_inputs(idx, cfg.run.T_train));
    const StepLoss step = compute_step_loss(tape, out.q, out.v, labels, cfg.teacher, alpha);
    const LossBreakdown& p = step.parts;
    if (!std::isfinite(p.l_final) || !std::isfinite(p.l_ce) || !std::isfinite(p.l_tks)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                          ", batch " + std::to_string(batches) +
                          ": l_ce=" + std::to_string(p.l_ce) +
                          " l_tks=" + std::to_string(p.l_tks) +
                          " l_final=" + std::to_string(p.l_final) +
                          " alpha=" + std::to_string(p.alpha));
    }
    tape.backward(step.loss);
    optimizer_step(params, opt);

    report.l_ce += p.l_ce;
    report.l_tks += p.l_tks;
    report.l_final += p.l_final;
    alpha_logged = p.alpha;
    hits += static_cast<std::size_t>(
        std::lround(top1_accuracy(out.o, labels) * static_cast<double>(b)));
    ++batches;
  }
  report.alpha = static_cast<float>(alpha_logged);
  report.l_ce /= static_cast<double>(batches);
  report.l_tks /= static_cast<double>(batches);
  report.l_final /= static_cast<double>(batches);
  report.train_acc = static_cast<double>(hits) / static_cast<double>(data.size());
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return report;
}

FitResult fit(const RunConfig& cfg, const FitOptions& options) {
  cfg.validate();
  DataSplits data = load_data(cfg);
  const ModelSpec spec = model_spec(cfg, data.train);

  std::optional<Model> model;
  std::optional<OptimizerState> opt;
  std::size_t start = 0;
  if (options.resume) {
    Checkpoint ckpt = load_checkpoint(*options.resume);
    if (!SameShapeContract(ckpt.model.spec(), spec)) {
      throw ConfigError("checkpoint '" + *options.resume +
                        "' was built for a different model or data shape");
    }
    model.emplace(ckpt.model);
    start = ckpt.epochs_completed;
    if (ckpt.optimizer) opt = std::move(ckpt.optimizer);
  } else {
    model.emplace(Model::build(spec, cfg.run.seed));
  }
  if (!opt) opt = make_optimizer(model->parameters(), cfg.optimizer, cfg.schedule.lr_max);

  const std::size_t stop =
      std::min(cfg.run.epochs, options.max_epochs.value_or(cfg.run.epochs));
  std::filesystem::path dir(cfg.run.out_dir);
  std::ofstream metrics;
  if (options.write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    WriteText(dir / "resolved_config.json", to_json(cfg).dump(2) + "\n");
    const auto mode = options.resume ? std::ios::app : std::ios::trunc;
    metrics.open(dir / "metrics.jsonl", std::ios::out | mode);
    if (!metrics) throw IoError("cannot open '" + (dir / "metrics.jsonl").string() + "'");
  }

  FitResult result{Checkpoint{*model, cfg.run.seed, start, std::nullopt, provenance_json(cfg)},
                   {}, std::move(data)};
  for (std::size_t epoch = start; epoch < stop; ++epoch) {
    EpochReport r = train_epoch(*model, *opt, result.data.train, cfg, epoch);
    if (metrics.is_open()) {
      metrics << to_json(r).dump() << '\n';
      metrics.flush();
      if (!metrics) throw IoError("write failure on '" + (dir / "metrics.jsonl").string() + "'");
    }
    if (options.on_epoch) options.on_epoch(r);
    result.history.push_back(r);
  }
  result.checkpoint.epochs_completed = std::max(start, stop);
  result.checkpoint.optimizer = std::move(opt);
  if (options.write_files) save_checkpoint(result.checkpoint, (dir / "model.ckpt").string());
  return result;
}

}  // namespace tks
