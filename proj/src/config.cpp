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

#include "tks/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "tks/error.hpp"

namespace tks {
namespace {

using nlohmann::json;

std::string TypeName(const json& v) {
  if (v.is_boolean()) return "boolean";
  if (v.is_number_unsigned()) return "non-negative integer";
  if (v.is_number_integer()) return "integer";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_object()) return "object";
  return v.type_name();
}

bool Compatible(const json& schema, const json& value) {
  if (schema.is_number_float()) return value.is_number();
  if (schema.is_number_unsigned()) return value.is_number_unsigned();
  if (schema.is_number_integer()) return value.is_number_integer();
  if (schema.is_boolean()) return value.is_boolean();
  if (schema.is_string()) return value.is_string();
  return false;
}

void MergeStrict(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) {
    throw ConfigError("config " + (path.empty() ? "root" : "'" + path + "'") +
                      " must be an object");
  }
  for (const auto& [key, value] : patch.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    auto it = base.find(key);
    if (it == base.end()) throw ConfigError("unknown config key '" + where + "'");
    if (it->is_object()) {
      MergeStrict(*it, value, where);
    } else if (!Compatible(*it, value)) {
      throw ConfigError("config key '" + where + "' expects a " + TypeName(*it) +
                        ", got " + value.dump());
    } else if (it->is_number_float()) {
      *it = value.get<double>();
    } else {
      *it = value;
    }
  }
}

json SectionModel(const ModelConfig& m) {
  return {{"arch", m.arch}, {"hidden", m.hidden}};
}

json SectionTeacher(const TeacherConfig& t) {
  return {{"mode", to_string(t.mode)}, {"k", t.k}, {"tau", json_number(t.tau)}, {"epsilon", json_number(t.epsilon)}};
}

json SectionSchedule(const ScheduleConfig& s) {
  return {{"lr_max", json_number(s.lr_max)},
          {"lr_min", json_number(s.lr_min)},
          {"alpha_start", json_number(s.alpha_start)},
          {"alpha_end", json_number(s.alpha_end)}};
}

json SectionOptimizer(const OptimizerConfig& o) {
  return {{"kind", to_string(o.kind)}, {"beta1", json_number(o.beta1)},
          {"beta2", json_number(o.beta2)},          {"eps", json_number(o.eps)},
          {"weight_decay", json_number(o.weight_decay)}, {"clip_norm", json_number(o.clip_norm)}};
}

json SectionData(const DataConfig& d) {
  return {{"kind", d.kind},
          {"n_per_class", d.n_per_class},
          {"n_test_per_class", d.n_test_per_class},
          {"classes", d.classes},
          {"block_width", d.block_width},
          {"noise_sigma", json_number(d.noise_sigma)},
          {"amplitude", json_number(d.amplitude)},
          {"seed", d.seed},
          {"train_images", d.train_images},
          {"train_labels", d.train_labels},
          {"test_images", d.test_images},
          {"test_labels", d.test_labels},
          {"train_manifest", d.train_manifest},
          {"test_manifest", d.test_manifest},
          {"width", d.width},
          {"height", d.height},
          {"cap", d.cap},
          {"train_prefix", d.train_prefix},
          {"test_prefix", d.test_prefix}};
}

json SectionRun(const RunSection& r) {
  return {{"T_train", r.T_train},
          {"epochs", r.epochs},
          {"batch_size", r.batch_size},
          {"seed", r.seed},
          {"out_dir", r.out_dir}};
}

RunConfig FromCompleteJson(const json& doc) {
  RunConfig c;
  c.preset = doc.at("preset").get<std::string>();
  const json& m = doc.at("model");
  c.model.arch = m.at("arch").get<std::string>();
  c.model.hidden = m.at("hidden").get<std::size_t>();
  c.lif = lif_from_json(doc.at("lif"));
  c.surrogate = surrogate_from_json(doc.at("surrogate"));
  const json& t = doc.at("teacher");
  c.teacher.mode = teacher_mode_from_string(t.at("mode").get<std::string>());
  c.teacher.k = t.at("k").get<std::size_t>();
  c.teacher.tau = t.at("tau").get<float>();
  c.teacher.epsilon = t.at("epsilon").get<float>();
  const json& s = doc.at("schedule");
  c.schedule.lr_max = s.at("lr_max").get<float>();
  c.schedule.lr_min = s.at("lr_min").get<float>();
  c.schedule.alpha_start = s.at("alpha_start").get<float>();
  c.schedule.alpha_end = s.at("alpha_end").get<float>();
  const json& o = doc.at("optimizer");
  c.optimizer.kind = optimizer_kind_from_string(o.at("kind").get<std::string>());
  c.optimizer.beta1 = o.at("beta1").get<float>();
  c.optimizer.beta2 = o.at("beta2").get<float>();
  c.optimizer.eps = o.at("eps").get<float>();
  c.optimizer.weight_decay = o.at("weight_decay").get<float>();
  c.optimizer.clip_norm = o.at("clip_norm").get<float>();
  const json& d = doc.at("data");
  c.data.kind = d.at("kind").get<std::string>();
  c.data.n_per_class = d.at("n_per_class").get<std::size_t>();
  c.data.n_test_per_class = d.at("n_test_per_class").get<std::size_t>();
  c.data.classes = d.at("classes").get<std::size_t>();
  c.data.block_width = d.at("block_width").get<std::size_t>();
  c.data.noise_sigma = d.at("noise_sigma").get<float>();
  c.data.amplitude = d.at("amplitude").get<float>();
  c.data.seed = d.at("seed").get<std::uint64_t>();
  c.data.train_images = d.at("train_images").get<std::string>();
  c.data.train_labels = d.at("train_labels").get<std::string>();
  c.data.test_images = d.at("test_images").get<std::string>();
  c.data.test_labels = d.at("test_labels").get<std::string>();
  c.data.train_manifest = d.at("train_manifest").get<std::string>();
  c.data.test_manifest = d.at("test_manifest").get<std::string>();
  c.data.width = d.at("width").get<std::size_t>();
  c.data.height = d.at("height").get<std::size_t>();
  c.data.cap = d.at("cap").get<std::uint32_t>();
  c.data.train_prefix = d.at("train_prefix").get<std::string>();
  c.data.test_prefix = d.at("test_prefix").get<std::string>();
  const json& r = doc.at("run");
  c.run.T_train = r.at("T_train").get<std::size_t>();
  c.run.epochs = r.at("epochs").get<std::size_t>();
  c.run.batch_size = r.at("batch_size").get<std::size_t>();
  c.run.seed = r.at("seed").get<std::uint64_t>();
  c.run.out_dir = r.at("out_dir").get<std::string>();
  return c;
}

json DefaultsFor(const json& doc) {
  std::string preset = "desk";
  if (doc.is_object() && doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError("config key 'preset' expects a string");
    preset = doc["preset"].get<std::string>();
  }
  return to_json(preset_config(preset));
}

json ParseScalar(const json& schema, const std::string& key, const std::string& text) {
  auto bad = [&] {
    return ConfigError("override '" + key + "' expects a " + TypeName(schema) +
                       ", got '" + text + "'");
  };
  if (schema.is_string()) return text;
  if (schema.is_boolean()) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw bad();
  }
  if (schema.is_number_unsigned() || schema.is_number_integer()) {
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size()) throw bad();
    return v;
  }
  if (schema.is_number_float()) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != text.size() || !std::isfinite(v)) throw bad();
    return v;
  }
  throw bad();
}

}  // namespace

void RunConfig::validate() const {
  if (model.arch != "mlp-small" && model.arch != "cnn-small") {
    throw ConfigError("model.arch '" + model.arch + "' is not mlp-small or cnn-small");
  }
  if (model.hidden < 1) throw ConfigError("model.hidden must be >= 1");
  lif.validate();
  surrogate.validate();
  teacher.validate();
  optimizer.validate();
  alpha_schedule().validate();
  if (!(schedule.lr_max > 0.0f) || !(schedule.lr_min >= 0.0f) ||
      schedule.lr_min > schedule.lr_max) {
    throw ConfigError("schedule needs 0 <= lr_min <= lr_max and lr_max > 0");
  }
  if (run.T_train < 1) throw ConfigError("run.T_train must be >= 1");
  if (run.batch_size < 1) throw ConfigError("run.batch_size must be >= 1");
  if (teacher.mode == TeacherMode::kTks && teacher.k > run.T_train) {
    throw ConfigError("teacher.k = " + std::to_string(teacher.k) +
                      " exceeds run.T_train = " + std::to_string(run.T_train));
  }
  const std::string& k = data.kind;
  if (k == "synthetic") {
    if (data.n_per_class < 1 || data.n_test_per_class < 1) {
      throw ConfigError("synthetic data needs n_per_class and n_test_per_class >= 1");
    }
    if (data.classes < 2) throw ConfigError("synthetic data needs >= 2 classes");
  } else if (k == "idx") {
    if (data.train_images.empty() || data.train_labels.empty() ||
        data.test_images.empty() || data.test_labels.empty()) {
      throw ConfigError("idx data needs train/test image and label paths");
    }
  } else if (k == "events") {
    if (data.train_manifest.empty() || data.test_manifest.empty() ||
        data.width == 0 || data.height == 0) {
      throw ConfigError("event data needs manifests and a sensor width/height");
    }
  } else if (k == "raw") {
    if (data.train_prefix.empty() || data.test_prefix.empty()) {
      throw ConfigError("raw data needs train_prefix and test_prefix");
    }
  } else {
    throw ConfigError("data.kind '" + k + "' is not synthetic, idx, events or raw");
  }
}

AlphaSchedule RunConfig::alpha_schedule() const {
  return AlphaSchedule{schedule.alpha_start, schedule.alpha_end,
                       std::max<std::size_t>(run.epochs, 1)};
}

double json_number(float value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  double out = 0.0;
  std::from_chars(buf, res.ptr, out);
  return out;
}

std::vector<std::string> preset_names() { return {"desk", "event", "large", "paper"}; }

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  auto apply_teacher = [&](const std::string& which) {
    const TeacherPreset p = teacher_preset(which);
    c.teacher.tau = p.tau;
    c.schedule.alpha_start = p.alpha_start;
    c.schedule.alpha_end = p.alpha_end;
  };
  if (name == "desk") {
    apply_teacher("static");
  } else if (name == "event") {
    apply_teacher("event");
  } else if (name == "large") {
    apply_teacher("large");
    c.optimizer.kind = OptimizerKind::kAdam;
    c.optimizer.weight_decay = 0.0f;
  } else if (name == "paper") {
    apply_teacher("static");
    c.run.batch_size = 128;
  } else {
    throw ConfigError("unknown config preset '" + name +
                      "' (expected desk, event, large or paper)");
  }
  return c;
}

nlohmann::json lif_to_json(const LifConfig& cfg) {
  return {{"tau_m", json_number(cfg.tau_m)},
          {"v_th", json_number(cfg.v_th)},
          {"v_rest", json_number(cfg.v_rest)},
          {"detach_reset", cfg.detach_reset}};
}

LifConfig lif_from_json(const nlohmann::json& doc) {
  LifConfig c;
  c.tau_m = doc.at("tau_m").get<float>();
  c.v_th = doc.at("v_th").get<float>();
  c.v_rest = doc.at("v_rest").get<float>();
  c.detach_reset = doc.at("detach_reset").get<bool>();
  return c;
}

nlohmann::json surrogate_to_json(const SurrogateSpec& spec) {
  return {{"kind", to_string(spec.kind)}, {"width", json_number(spec.width)}};
}

SurrogateSpec surrogate_from_json(const nlohmann::json& doc) {
  SurrogateSpec s;
  s.kind = surrogate_kind_from_string(doc.at("kind").get<std::string>());
  s.width = doc.at("width").get<float>();
  return s;
}

nlohmann::json to_json(const RunConfig& cfg) {
  return {{"preset", cfg.preset},
          {"model", SectionModel(cfg.model)},
          {"lif", lif_to_json(cfg.lif)},
          {"surrogate", surrogate_to_json(cfg.surrogate)},
          {"teacher", SectionTeacher(cfg.teacher)},
          {"schedule", SectionSchedule(cfg.schedule)},
          {"optimizer", SectionOptimizer(cfg.optimizer)},
          {"data", SectionData(cfg.data)},
          {"run", SectionRun(cfg.run)}};
}

RunConfig run_config_from_json(const nlohmann::json& doc) {
  json full = DefaultsFor(doc);
  MergeStrict(full, doc, "");
  try {
    return FromCompleteJson(full);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (!node->is_object() || !node->contains(part)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) {
    throw ConfigError("override '" + key + "' names a section, not a value");
  }
  *node = ParseScalar(*node, key, text);
}

RunConfig resolve_config(const std::optional<std::string>& config_path,
                         const std::vector<std::string>& overrides) {
  json file = json::object();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw IoError("cannot open config '" + *config_path + "'");
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config '" + *config_path + "': " + e.what());
    }
  }
  return resolve_config_doc(std::move(file), overrides);
}

RunConfig resolve_config_doc(nlohmann::json doc, const std::vector<std::string>& overrides) {
  // A preset override has to be known before defaults are chosen.
  for (const std::string& o : overrides) {
    if (o.rfind("preset=", 0) == 0) doc["preset"] = o.substr(7);
  }
  json full = DefaultsFor(doc);
  MergeStrict(full, doc, "");
  for (const std::string& o : overrides) apply_override(full, o);
  RunConfig cfg = run_config_from_json(full);
  cfg.validate();
  return cfg;
}

nlohmann::json provenance_json(const RunConfig& cfg) {
  json doc = to_json(cfg);
  doc["run"].erase("out_dir");
  return doc;
}

}  // namespace tks
