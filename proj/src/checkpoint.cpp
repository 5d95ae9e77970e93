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

#include "tks/checkpoint.hpp"

#include <cstring>

#include "tks/config.hpp"
#include "tks/data.hpp"
#include "tks/error.hpp"

namespace tks {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'T', 'K', 'S', 'C', 'K', 'P', 'T', '\0'};

void AppendLe(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t ReadLe(std::span<const std::uint8_t> in, std::size_t offset, int bytes) {
  if (offset + bytes > in.size()) {
    throw FormatError("checkpoint truncated at byte offset " + std::to_string(offset));
  }
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in[offset + i]} << (8 * i);
  return v;
}

json LayerJson(const Layer& layer) {
  json j = {{"kind", layer_kind(layer)}};
  if (const auto* l = std::get_if<LinearLayer>(&layer)) {
    j["in"] = l->in;
    j["out"] = l->out;
  } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
    j["in_channels"] = c->in_channels;
    j["out_channels"] = c->out_channels;
    j["kernel"] = c->kernel;
    j["stride"] = c->stride;
    j["padding"] = c->padding;
  } else if (const auto* p = std::get_if<AvgPool2dLayer>(&layer)) {
    j["window"] = p->window;
  }
  return j;
}

json Header(const Checkpoint& ckpt) {
  const Model& m = ckpt.model;
  const ModelSpec& s = m.spec();
  json layers = json::array();
  for (const Layer& layer : m.layers()) layers.push_back(LayerJson(layer));
  layers.push_back(LayerJson(m.readout()));
  json params = json::array();
  for (const Tensor& p : m.parameters()) params.push_back(p.shape());
  json h = {{"format_version", kCheckpointVersion},
            {"preset", s.preset},
            {"input_shape", s.input_shape},
            {"classes", s.classes},
            {"hidden", s.hidden},
            {"layers", layers},
            {"parameter_shapes", params},
            {"lif", lif_to_json(s.lif)},
            {"surrogate", surrogate_to_json(s.surrogate)},
            {"seed", ckpt.seed},
            {"epochs_completed", ckpt.epochs_completed},
            {"run_config", ckpt.run_config}};
  if (ckpt.optimizer) {
    const OptimizerState& o = *ckpt.optimizer;
    h["optimizer"] = {{"kind", to_string(o.cfg.kind)},
                      {"beta1", json_number(o.cfg.beta1)},
                      {"beta2", json_number(o.cfg.beta2)},
                      {"eps", json_number(o.cfg.eps)},
                      {"weight_decay", json_number(o.cfg.weight_decay)},
                      {"clip_norm", json_number(o.cfg.clip_norm)},
                      {"lr", json_number(o.lr)},
                      {"step", o.step}};
  } else {
    h["optimizer"] = nullptr;
  }
  return h;
}

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const std::string header = Header(ckpt).dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + sizeof kMagic);
  AppendLe(out, kCheckpointVersion, 4);
  AppendLe(out, header.size(), 8);
  out.insert(out.end(), header.begin(), header.end());
  const std::vector<Tensor> params = ckpt.model.parameters();
  for (const Tensor& p : params) append_f32_le(out, p.data());
  if (ckpt.optimizer) {
    if (ckpt.optimizer->m.size() != params.size() ||
        ckpt.optimizer->v.size() != params.size()) {
      throw ContractError("checkpoint: optimizer state does not match the model");
    }
    for (const auto& m : ckpt.optimizer->m) append_f32_le(out, m);
    for (const auto& v : ckpt.optimizer->v) append_f32_le(out, v);
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof kMagic ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a checkpoint: bad magic at byte offset 0");
  }
  const std::uint64_t version = ReadLe(bytes, 8, 4);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version) +
                      " at byte offset 8");
  }
  const std::uint64_t header_len = ReadLe(bytes, 12, 8);
  const std::size_t header_at = 20;
  if (header_len > bytes.size() - header_at) {
    throw FormatError("checkpoint header truncated at byte offset " +
                      std::to_string(bytes.size()));
  }
  json h;
  try {
    h = json::parse(bytes.begin() + header_at, bytes.begin() + header_at + header_len);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header at byte offset 20: ") + e.what());
  }
  try {
    ModelSpec spec;
    spec.preset = h.at("preset").get<std::string>();
    spec.input_shape = h.at("input_shape").get<Shape>();
    spec.classes = h.at("classes").get<std::size_t>();
    spec.hidden = h.at("hidden").get<std::size_t>();
    spec.lif = lif_from_json(h.at("lif"));
    spec.surrogate = surrogate_from_json(h.at("surrogate"));
    Model model = Model::build(spec, 0);
    std::vector<Tensor> params = model.parameters();
    const auto shapes = h.at("parameter_shapes").get<std::vector<Shape>>();
    if (shapes.size() != params.size()) {
      throw FormatError("checkpoint lists " + std::to_string(shapes.size()) +
                        " parameters, preset has " + std::to_string(params.size()));
    }
    std::size_t offset = header_at + header_len;
    auto read_block = [&](std::span<float> dst) {
      read_f32_le(bytes.subspan(std::min(offset, bytes.size())), dst);
      offset += 4 * dst.size();
    };
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (shapes[i] != params[i].shape()) {
        throw FormatError("checkpoint parameter " + std::to_string(i) + " has shape " +
                          shape_string(shapes[i]) + ", preset expects " +
                          shape_string(params[i].shape()));
      }
      read_block(params[i].mutable_data());
    }
    Checkpoint ckpt{model, h.at("seed").get<std::uint64_t>(),
                    h.at("epochs_completed").get<std::size_t>(), std::nullopt,
                    h.at("run_config")};
    const json& o = h.at("optimizer");
    if (!o.is_null()) {
      OptimizerConfig cfg;
      cfg.kind = optimizer_kind_from_string(o.at("kind").get<std::string>());
      cfg.beta1 = o.at("beta1").get<float>();
      cfg.beta2 = o.at("beta2").get<float>();
      cfg.eps = o.at("eps").get<float>();
      cfg.weight_decay = o.at("weight_decay").get<float>();
      cfg.clip_norm = o.at("clip_norm").get<float>();
      OptimizerState st = make_optimizer(params, cfg, o.at("lr").get<float>());
      st.step = o.at("step").get<std::uint64_t>();
      for (auto& m : st.m) read_block(m);
      for (auto& v : st.v) read_block(v);
      ckpt.optimizer = std::move(st);
    }
    if (offset != bytes.size()) {
      throw FormatError("checkpoint has " + std::to_string(bytes.size() - offset) +
                        " trailing bytes at byte offset " + std::to_string(offset));
    }
    return ckpt;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError("'" + path + "': " + e.what());
  }
}

}  // namespace tks
