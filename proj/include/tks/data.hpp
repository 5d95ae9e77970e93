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
#include <span>
#include <string>
#include <vector>

#include "tks/tensor.hpp"

namespace tks {

// One address-event: microsecond timestamp, pixel column/row, polarity.
struct Event {
  std::uint64_t t = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint8_t p = 0;
};

struct EventStream {
  std::vector<Event> events;  // sorted by t after load
  std::size_t width = 0;
  std::size_t height = 0;
  std::uint64_t duration = 0;  // windows cover [0, duration]
};

struct Dataset {
  // Static [N, ...] or temporal [N, T, ...].
  Tensor inputs;
  std::vector<int> labels;
  std::size_t class_count = 0;
  std::string split;
  bool temporal = false;

  // Set for event datasets so they can be re-binned at another T.
  std::vector<EventStream> streams;
  std::uint32_t event_cap = 0;

  std::size_t size() const { return labels.size(); }
  // Timesteps stored per sample; 0 for static data.
  std::size_t steps() const;
  // Shape of one sample at one timestep.
  Shape frame_shape() const;

  // Labels in range, uniform T, input count matches labels.
  void validate() const;

  // Same samples re-encoded for T steps: event streams are re-binned,
  // other temporal data keeps frame t mod steps(), static data is unchanged.
  Dataset with_steps(std::size_t T) const;

  // [T, B, frame...] for the given samples. Static samples are repeated
  // (constant-current encoding); temporal samples use frame t mod steps().
  Tensor batch_inputs(std::span<const std::size_t> indices, std::size_t T) const;
  std::vector<int> batch_labels(std::span<const std::size_t> indices) const;
};

// --- synthetic order-encoded task ---------------------------------------

// Each class walks through the same set of feature blocks, one block per
// timestep, in a class-specific order. Class 2p uses stride p+1 modulo a
// prime block count; class 2p+1 is its time reversal. Every block is
// visited equally often when T is a multiple of the block count, so no
// single frame identifies the class; only the order does.
struct SynthSpec {
  std::size_t n_per_class = 128;
  std::size_t T = 10;
  std::size_t classes = 4;
  float noise_sigma = 0.1f;
  std::uint64_t seed = 0;
  std::size_t block_width = 8;
  float amplitude = 1.0f;
};

// Number of feature blocks used for `classes` classes.
std::size_t synth_block_count(std::size_t classes);
// schedule[c][t] = active block of class c at step t.
std::vector<std::vector<std::size_t>> synth_schedules(std::size_t T,
                                                      std::size_t classes);
Dataset synth_temporal(const SynthSpec& spec);

// --- IDX (big-endian, magic 0x00000803 images / 0x00000801 labels) -------

Dataset load_idx(const std::string& images_path, const std::string& labels_path);
// Pixels are written as round(value * 255); static [N, 1, H, W] or [N, H, W].
void write_idx(const Dataset& data, const std::string& images_path,
               const std::string& labels_path);

// --- AER text streams ("t x y p" per line) -------------------------------

// Lines starting with '#' are comments. Duration is the last timestamp.
EventStream load_events(const std::string& path, std::size_t width,
                        std::size_t height);
void write_events(const EventStream& stream, const std::string& path);
// [T, 2, H, W] per-window, per-polarity counts. Windows split [0, duration]
// into T equal half-open intervals, the last one closed. cap > 0 clips counts.
Tensor bin_events(const EventStream& stream, std::size_t T, std::uint32_t cap = 0);
// Manifest lines "relative/path.txt label"; samples binned at T.
Dataset load_event_dataset(const std::string& manifest_path, std::size_t width,
                           std::size_t height, std::size_t T,
                           std::uint32_t cap = 0);

// --- raw float container -------------------------------------------------

// <prefix>.bin holds little-endian float32 inputs then labels;
// <prefix>.json describes shapes, offsets and class count.
void write_raw_dataset(const Dataset& data, const std::string& prefix);
Dataset read_raw_dataset(const std::string& prefix);

// Little-endian byte helpers shared with the checkpoint format.
void append_f32_le(std::vector<std::uint8_t>& out, std::span<const float> values);
void read_f32_le(std::span<const std::uint8_t> in, std::span<float> values);
std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace tks
