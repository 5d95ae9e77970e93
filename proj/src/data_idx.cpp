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
#include <cmath>
#include <cstdio>

#include "tks/data.hpp"
#include "tks/error.hpp"

namespace tks {
namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t ReadBe32(const std::vector<std::uint8_t>& bytes, std::size_t offset,
                       const std::string& path) {
  if (offset + 4 > bytes.size()) {
    throw FormatError("'" + path + "': truncated header at byte offset " +
                      std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void AppendBe32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void CheckMagic(std::uint32_t got, std::uint32_t want, const std::string& path) {
  if (got != want) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "bad magic 0x%08x (want 0x%08x)", got, want);
    throw FormatError("'" + path + "': " + buf + " at byte offset 0");
  }
}

void CheckPayload(std::size_t have, std::size_t header, std::size_t need,
                  const std::string& path) {
  if (have < header + need) {
    throw FormatError("'" + path + "': truncated payload at byte offset " +
                      std::to_string(have) + ", expected " +
                      std::to_string(header + need) + " bytes");
  }
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  const std::vector<std::uint8_t> img = read_file_bytes(images_path);
  const std::vector<std::uint8_t> lab = read_file_bytes(labels_path);
  CheckMagic(ReadBe32(img, 0, images_path), kImageMagic, images_path);
  CheckMagic(ReadBe32(lab, 0, labels_path), kLabelMagic, labels_path);

  const std::size_t n = ReadBe32(img, 4, images_path);
  const std::size_t rows = ReadBe32(img, 8, images_path);
  const std::size_t cols = ReadBe32(img, 12, images_path);
  const std::size_t n_labels = ReadBe32(lab, 4, labels_path);
  if (n != n_labels) {
    throw DataError("'" + images_path + "' has " + std::to_string(n) +
                    " images but '" + labels_path + "' has " +
                    std::to_string(n_labels) + " labels");
  }
  const std::size_t pixels = rows * cols;
  CheckPayload(img.size(), 16, n * pixels, images_path);
  CheckPayload(lab.size(), 8, n, labels_path);

  std::vector<float> values(n * pixels);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(img[16 + i]) / 255.0f;
  }
  Dataset d;
  d.labels.resize(n);
  int max_label = -1;
  for (std::size_t i = 0; i < n; ++i) {
    d.labels[i] = lab[8 + i];
    max_label = std::max(max_label, d.labels[i]);
  }
  d.inputs = Tensor::from({n, 1, rows, cols}, std::move(values));
  d.class_count = static_cast<std::size_t>(max_label + 1);
  d.split = "idx";
  d.temporal = false;
  return d;
}

void write_idx(const Dataset& data, const std::string& images_path,
               const std::string& labels_path) {
  data.validate();
  const Shape& s = data.inputs.shape();
  const bool ok = !data.temporal &&
                  (s.size() == 3 || (s.size() == 4 && s[1] == 1));
  if (!ok) {
    throw DimensionError("IDX export needs static [N, H, W] or [N, 1, H, W] inputs, got " +
                         shape_string(s));
  }
  const std::size_t rows = s[s.size() - 2];
  const std::size_t cols = s[s.size() - 1];
  std::vector<std::uint8_t> img;
  AppendBe32(img, kImageMagic);
  AppendBe32(img, static_cast<std::uint32_t>(s[0]));
  AppendBe32(img, static_cast<std::uint32_t>(rows));
  AppendBe32(img, static_cast<std::uint32_t>(cols));
  for (float v : data.inputs.data()) {
    const float px = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f);
    img.push_back(static_cast<std::uint8_t>(px));
  }
  std::vector<std::uint8_t> lab;
  AppendBe32(lab, kLabelMagic);
  AppendBe32(lab, static_cast<std::uint32_t>(data.size()));
  for (int y : data.labels) {
    if (y > 255) throw DataError("label " + std::to_string(y) + " does not fit in IDX");
    lab.push_back(static_cast<std::uint8_t>(y));
  }
  write_file_bytes(images_path, img);
  write_file_bytes(labels_path, lab);
}

}  // namespace tks
