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

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "tks/data.hpp"
#include "tks/error.hpp"

namespace tks {

std::size_t Dataset::steps() const { return temporal ? inputs.dim(1) : 0; }

Shape Dataset::frame_shape() const {
  const Shape& s = inputs.shape();
  const std::size_t skip = temporal ? 2 : 1;
  if (s.size() <= skip) {
    throw DimensionError("dataset inputs " + shape_string(s) +
                         " have no per-frame axes");
  }
  return Shape(s.begin() + skip, s.end());
}

void Dataset::validate() const {
  if (!inputs.defined()) throw DataError("dataset has no inputs");
  if (inputs.rank() < (temporal ? 3u : 2u)) {
    throw DataError("dataset inputs " + shape_string(inputs.shape()) +
                    " lack sample/frame axes");
  }
  if (inputs.dim(0) != labels.size()) {
    throw DataError("dataset has " + std::to_string(inputs.dim(0)) +
                    " inputs but " + std::to_string(labels.size()) + " labels");
  }
  if (temporal && inputs.dim(1) == 0) throw DataError("temporal dataset with T = 0");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_count) {
      throw DataError("label " + std::to_string(labels[i]) + " of sample " +
                      std::to_string(i) + " outside [0, " +
                      std::to_string(class_count) + ")");
    }
  }
}

Dataset Dataset::with_steps(std::size_t T) const {
  if (T == 0) throw ParameterError("with_steps needs T >= 1");
  if (!temporal) return *this;
  if (!streams.empty()) {
    Dataset out = *this;
    const std::size_t per = 2 * streams.front().height * streams.front().width;
    std::vector<float> values;
    values.reserve(streams.size() * T * per);
    for (const EventStream& s : streams) {
      Tensor frames = bin_events(s, T, event_cap);
      values.insert(values.end(), frames.data().begin(), frames.data().end());
    }
    Shape shape{streams.size(), T};
    const Shape frame = frame_shape();
    shape.insert(shape.end(), frame.begin(), frame.end());
    out.inputs = Tensor::from(shape, std::move(values));
    return out;
  }
  std::vector<std::size_t> all(size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  Dataset out = *this;
  Tensor tb = batch_inputs(all, T);  // [T, N, frame...]
  const std::size_t frame = shape_numel(frame_shape());
  std::vector<float> values(tb.numel());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t n = 0; n < size(); ++n) {
      std::memcpy(values.data() + (n * T + t) * frame,
                  tb.data().data() + (t * size() + n) * frame,
                  frame * sizeof(float));
    }
  }
  Shape shape{size(), T};
  const Shape fs = frame_shape();
  shape.insert(shape.end(), fs.begin(), fs.end());
  out.inputs = Tensor::from(shape, std::move(values));
  return out;
}

Tensor Dataset::batch_inputs(std::span<const std::size_t> indices,
                             std::size_t T) const {
  if (T == 0) throw ParameterError("batch_inputs needs T >= 1");
  const Shape fs = frame_shape();
  const std::size_t frame = shape_numel(fs);
  const std::size_t b = indices.size();
  const std::size_t stored = temporal ? steps() : 1;
  std::vector<float> values(T * b * frame);
  const float* src = inputs.data().data();
  for (std::size_t i = 0; i < b; ++i) {
    if (indices[i] >= size()) {
      throw DimensionError("sample index " + std::to_string(indices[i]) +
                           " out of range for " + std::to_string(size()) +
                           " samples");
    }
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t frame_index = temporal ? t % stored : 0;
      std::memcpy(values.data() + (t * b + i) * frame,
                  src + (indices[i] * stored + frame_index) * frame,
                  frame * sizeof(float));
    }
  }
  Shape shape{T, b};
  shape.insert(shape.end(), fs.begin(), fs.end());
  return Tensor::from(std::move(shape), std::move(values));
}

std::vector<int> Dataset::batch_labels(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(labels.at(i));
  return out;
}

void append_f32_le(std::vector<std::uint8_t>& out, std::span<const float> values) {
  out.reserve(out.size() + 4 * values.size());
  for (float f : values) {
    const std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
    for (int shift = 0; shift < 32; shift += 8) {
      out.push_back(static_cast<std::uint8_t>(bits >> shift));
    }
  }
}

void read_f32_le(std::span<const std::uint8_t> in, std::span<float> values) {
  if (in.size() < 4 * values.size()) {
    throw FormatError("float block truncated: need " +
                      std::to_string(4 * values.size()) + " bytes, have " +
                      std::to_string(in.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= static_cast<std::uint32_t>(in[4 * i + b]) << (8 * b);
    }
    values[i] = std::bit_cast<float>(bits);
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure on '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

void write_raw_dataset(const Dataset& data, const std::string& prefix) {
  data.validate();
  std::vector<std::uint8_t> bytes;
  append_f32_le(bytes, data.inputs.data());
  const std::size_t labels_offset = bytes.size();
  std::vector<float> labels(data.labels.begin(), data.labels.end());
  append_f32_le(bytes, labels);

  nlohmann::json meta;
  meta["format"] = "tks-raw-f32";
  meta["version"] = 1;
  meta["byte_order"] = "little";
  meta["inputs"] = {{"shape", data.inputs.shape()}, {"offset", 0}};
  meta["labels"] = {{"shape", {data.labels.size()}}, {"offset", labels_offset}};
  meta["class_count"] = data.class_count;
  meta["split"] = data.split;
  meta["temporal"] = data.temporal;
  const std::string text = meta.dump(2) + "\n";
  write_file_bytes(prefix + ".bin", bytes);
  write_file_bytes(prefix + ".json",
                   std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

Dataset read_raw_dataset(const std::string& prefix) {
  const std::vector<std::uint8_t> sidecar = read_file_bytes(prefix + ".json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(sidecar.begin(), sidecar.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + prefix + ".json': " + e.what());
  }
  if (meta.value("format", "") != "tks-raw-f32" || meta.value("version", 0) != 1) {
    throw FormatError("'" + prefix + ".json' is not a tks-raw-f32 v1 sidecar");
  }
  const std::vector<std::uint8_t> bytes = read_file_bytes(prefix + ".bin");
  Dataset d;
  try {
    const Shape shape = meta.at("inputs").at("shape").get<Shape>();
    const std::size_t in_off = meta.at("inputs").at("offset").get<std::size_t>();
    const std::size_t n = meta.at("labels").at("shape").at(0).get<std::size_t>();
    const std::size_t lab_off = meta.at("labels").at("offset").get<std::size_t>();
    if (in_off > bytes.size() || lab_off > bytes.size()) {
      throw FormatError("'" + prefix + ".bin' shorter than sidecar offsets");
    }
    std::vector<float> values(shape_numel(shape));
    read_f32_le(std::span(bytes).subspan(in_off), values);
    std::vector<float> labels(n);
    read_f32_le(std::span(bytes).subspan(lab_off), labels);
    d.inputs = Tensor::from(shape, std::move(values));
    d.labels.assign(labels.begin(), labels.end());
    d.class_count = meta.at("class_count").get<std::size_t>();
    d.split = meta.value("split", "");
    d.temporal = meta.at("temporal").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("'" + prefix + ".json': " + e.what());
  }
  d.validate();
  return d;
}

}  // namespace tks
