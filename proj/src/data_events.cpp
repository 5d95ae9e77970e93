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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tks/data.hpp"
#include "tks/error.hpp"

namespace tks {
namespace {

bool SkipLine(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace

EventStream load_events(const std::string& path, std::size_t width,
                        std::size_t height) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  EventStream s;
  s.width = width;
  s.height = height;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    std::istringstream fields(line);
    long long t = -1, x = -1, y = -1, p = -1;
    std::string extra;
    if (!(fields >> t >> x >> y >> p) || (fields >> extra) || t < 0 || x < 0 ||
        y < 0 || p < 0) {
      throw ParseError("'" + path + "' line " + std::to_string(line_no) +
                       ": expected four non-negative integers 't x y p', got '" +
                       line + "'");
    }
    if (p > 1) {
      throw DataError("'" + path + "' line " + std::to_string(line_no) +
                      ": polarity " + std::to_string(p) + " not in {0, 1}");
    }
    if (static_cast<std::size_t>(x) >= width || static_cast<std::size_t>(y) >= height) {
      throw DataError("'" + path + "' line " + std::to_string(line_no) + ": (" +
                      std::to_string(x) + ", " + std::to_string(y) +
                      ") outside " + std::to_string(width) + "x" +
                      std::to_string(height) + " sensor");
    }
    s.events.push_back({static_cast<std::uint64_t>(t), static_cast<std::uint32_t>(x),
                        static_cast<std::uint32_t>(y), static_cast<std::uint8_t>(p)});
  }
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });
  s.duration = s.events.empty() ? 0 : s.events.back().t;
  return s;
}

void write_events(const EventStream& stream, const std::string& path) {
  std::ostringstream out;
  for (const Event& e : stream.events) {
    out << e.t << ' ' << e.x << ' ' << e.y << ' ' << int{e.p} << '\n';
  }
  const std::string text = out.str();
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                   text.size()));
}

Tensor bin_events(const EventStream& stream, std::size_t T, std::uint32_t cap) {
  if (T == 0) throw ParameterError("bin_events needs T >= 1");
  const std::size_t h = stream.height, w = stream.width;
  Tensor out = Tensor::zeros({T, 2, h, w});
  std::span<float> frames = out.mutable_data();
  for (const Event& e : stream.events) {
    if (e.x >= w || e.y >= h || e.p > 1) {
      throw DataError("event (" + std::to_string(e.x) + ", " + std::to_string(e.y) +
                      ", p=" + std::to_string(int{e.p}) + ") outside the sensor");
    }
    if (e.t > stream.duration) {
      throw DataError("event at t=" + std::to_string(e.t) + " after duration " +
                      std::to_string(stream.duration));
    }
    std::size_t window = T - 1;
    if (e.t < stream.duration) {
      window = static_cast<std::size_t>(
          (static_cast<unsigned __int128>(e.t) * T) / stream.duration);
    }
    float& cell = frames[((window * 2 + e.p) * h + e.y) * w + e.x];
    if (cap == 0 || cell < static_cast<float>(cap)) cell += 1.0f;
  }
  return out;
}

Dataset load_event_dataset(const std::string& manifest_path, std::size_t width,
                           std::size_t height, std::size_t T, std::uint32_t cap) {
  if (T == 0) throw ParameterError("event dataset needs T >= 1");
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open '" + manifest_path + "' for reading");
  const std::filesystem::path base =
      std::filesystem::path(manifest_path).parent_path();
  Dataset d;
  d.temporal = true;
  d.split = "events";
  d.event_cap = cap;
  std::string line;
  std::size_t line_no = 0;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    std::istringstream fields(line);
    std::string rel;
    int label = -1;
    if (!(fields >> rel >> label) || label < 0) {
      throw ParseError("'" + manifest_path + "' line " + std::to_string(line_no) +
                       ": expected 'path label'");
    }
    d.streams.push_back(load_events((base / rel).string(), width, height));
    d.labels.push_back(label);
    max_label = std::max(max_label, label);
  }
  if (d.streams.empty()) throw DataError("'" + manifest_path + "' lists no samples");
  d.class_count = static_cast<std::size_t>(max_label + 1);
  const std::size_t per = T * 2 * height * width;
  std::vector<float> values;
  values.reserve(d.streams.size() * per);
  for (const EventStream& s : d.streams) {
    Tensor frames = bin_events(s, T, cap);
    values.insert(values.end(), frames.data().begin(), frames.data().end());
  }
  d.inputs = Tensor::from({d.streams.size(), T, 2, height, width}, std::move(values));
  return d;
}

}  // namespace tks
