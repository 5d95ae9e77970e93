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
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "tks/network.hpp"
#include "tks/optimizer.hpp"

namespace tks {

// Binary layout:
//   "TKSCKPT\0"  u32 format version  u64 header length  header (JSON)
//   parameter blobs in layer order, float32 little-endian
//   optimizer first then second moments, same order, when present
struct Checkpoint {
  Model model;
  std::uint64_t seed = 0;
  std::size_t epochs_completed = 0;
  std::optional<OptimizerState> optimizer;
  nlohmann::json run_config;  // null when absent
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tks
