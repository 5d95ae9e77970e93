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

#include "tks/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "tks/checkpoint.hpp"
#include "tks/config.hpp"
#include "tks/error.hpp"
#include "tks/evaluation.hpp"
#include "tks/gradcheck.hpp"
#include "tks/trainer.hpp"

namespace tks {
namespace {

constexpr double kGradTolerance = 1e-3;

void WriteText(const std::string& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                   text.size()));
}

void DumpConfig(const RunConfig& cfg, std::ostream& err) {
  err << "resolved config:\n" << to_json(cfg).dump(2) << "\n";
}

std::vector<std::size_t> ParseSteps(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty() || v == 0) {
      throw ConfigError("--t expects a comma-separated list of positive integers, got '" +
                        list + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw ConfigError("--t needs at least one value");
  return out;
}

// Config for a checkpoint: its embedded run config, an explicit file
// replacing it, then overrides.
RunConfig ConfigForCheckpoint(const Checkpoint& ckpt, const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  if (!config_path.empty()) return resolve_config(config_path, overrides);
  nlohmann::json doc = ckpt.run_config.is_null() ? nlohmann::json::object()
                                                 : ckpt.run_config;
  return resolve_config_doc(std::move(doc), overrides);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spiking network training with temporal knowledge sharing", "tks"};
  app.require_subcommand(1);

  std::string config_path, checkpoint_path, resume_path, out_path, t_list;
  std::vector<std::string> overrides;
  std::size_t seeds = 10;
  std::size_t t_eval = 0;

  CLI::App* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", config_path, "JSON run config");
  train->add_option("--set", overrides, "override, e.g. teacher.mode=none");
  train->add_option("--resume", resume_path, "checkpoint to continue from");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
  eval->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  eval->add_option("--config", config_path, "JSON run config (default: embedded)");
  eval->add_option("--set", overrides, "override, e.g. data.seed=3");
  eval->add_option("--t", t_eval, "timesteps (default: run.T_train)");
  eval->add_option("--out", out_path, "report file (default: eval.json next to checkpoint)");

  CLI::App* sweep = app.add_subcommand("sweep", "test accuracy across timestep counts");
  sweep->add_option("--checkpoint", checkpoint_path, "model checkpoint")->required();
  sweep->add_option("--config", config_path, "JSON run config (default: embedded)");
  sweep->add_option("--set", overrides, "override");
  sweep->add_option("--t", t_list, "comma-separated T_test values")->required();
  sweep->add_option("--out", out_path, "CSV file");

  CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  grad->add_option("--seeds", seeds, "random seeds per case");

  CLI::App* synth = app.add_subcommand("synth", "write the synthetic dataset");
  synth->add_option("--config", config_path, "JSON run config");
  synth->add_option("--set", overrides, "override, e.g. data.classes=6");
  synth->add_option("--out", out_path, "output prefix")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  const std::optional<std::string> cfg_file =
      config_path.empty() ? std::nullopt : std::optional(config_path);
  try {
    if (*train) {
      const RunConfig cfg = resolve_config(cfg_file, overrides);
      DumpConfig(cfg, err);
      FitOptions options;
      if (!resume_path.empty()) options.resume = resume_path;
      options.on_epoch = [&err](const EpochReport& r) {
        err << to_json(r).dump() << "\n";
      };
      const FitResult result = fit(cfg, options);
      const EvalReport report =
          evaluate(result.checkpoint.model, result.data.test, cfg.run.T_train);
      const std::string text = to_json(report).dump(2) + "\n";
      WriteText((std::filesystem::path(cfg.run.out_dir) / "eval.json").string(), text);
      out << text;
    } else if (*eval) {
      const Checkpoint ckpt = load_checkpoint(checkpoint_path);
      const RunConfig cfg = ConfigForCheckpoint(ckpt, config_path, overrides);
      DumpConfig(cfg, err);
      const DataSplits data = load_data(cfg);
      const std::size_t T = t_eval > 0 ? t_eval : cfg.run.T_train;
      const std::string text = to_json(evaluate(ckpt.model, data.test, T)).dump(2) + "\n";
      if (out_path.empty()) {
        out_path = (std::filesystem::path(checkpoint_path).parent_path() / "eval.json").string();
      }
      WriteText(out_path, text);
      out << text;
    } else if (*sweep) {
      const std::vector<std::size_t> steps = ParseSteps(t_list);
      const Checkpoint ckpt = load_checkpoint(checkpoint_path);
      const RunConfig cfg = ConfigForCheckpoint(ckpt, config_path, overrides);
      DumpConfig(cfg, err);
      const DataSplits data = load_data(cfg);
      const std::string csv = sweep_csv(timestep_sweep(ckpt.model, data.test, steps));
      if (!out_path.empty()) WriteText(out_path, csv);
      out << csv;
    } else if (*grad) {
      if (seeds == 0) throw ConfigError("--seeds must be >= 1");
      const GradcheckReport report = run_gradcheck(seeds);
      nlohmann::json doc = {{"max_rel_error", report.max_rel_error},
                            {"spike_mismatches", report.spike_mismatches},
                            {"tolerance", kGradTolerance}};
      for (const GradcheckCase& c : report.cases) doc["cases"][c.name] = c.max_rel_error;
      out << doc.dump(2) << "\n";
      const bool ok = report.max_rel_error < kGradTolerance && report.spike_mismatches == 0;
      if (!ok) err << "gradcheck failed\n";
      return ok ? 0 : 2;
    } else if (*synth) {
      RunConfig cfg = resolve_config(cfg_file, overrides);
      if (cfg.data.kind != "synthetic") {
        throw ConfigError("synth needs data.kind = synthetic, got '" + cfg.data.kind + "'");
      }
      DumpConfig(cfg, err);
      const DataSplits data = load_data(cfg);
      write_raw_dataset(data.train, out_path + ".train");
      write_raw_dataset(data.test, out_path + ".test");
      out << out_path << ".train.{bin,json}\n" << out_path << ".test.{bin,json}\n";
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace tks
