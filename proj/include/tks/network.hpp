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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tks/lif.hpp"
#include "tks/surrogate.hpp"
#include "tks/tape.hpp"
#include "tks/tensor.hpp"

namespace tks {

struct LinearLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  Tensor weight;  // [in, out]
  Tensor bias;    // [out]
};

struct Conv2dLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 3;
  std::size_t stride = 1;
  std::size_t padding = 1;
  Tensor weight;  // [out, in, k, k]
  Tensor bias;    // [out]
};

struct AvgPool2dLayer {
  std::size_t window = 2;
};

struct FlattenLayer {};

struct LifLayer {
  LifConfig cfg;
};

using Layer =
    std::variant<LinearLayer, Conv2dLayer, AvgPool2dLayer, FlattenLayer, LifLayer>;

std::string layer_kind(const Layer& layer);

// Everything needed to rebuild a model's structure.
struct ModelSpec {
  std::string preset = "mlp-small";  // "mlp-small" or "cnn-small"
  Shape input_shape;                 // per sample, without batch
  std::size_t classes = 0;
  std::size_t hidden = 128;          // mlp-small hidden width
  LifConfig lif;
  SurrogateSpec surrogate;
};

// Per-timestep logits, probabilities and their time average.
struct TemporalOutput {
  Tensor q;  // [T, B, C]
  Tensor v;  // [T, B, C]
  Tensor o;  // [B, C]
};

// Stack of layers followed by a non-spiking linear readout that maps the last
// hidden activity to class logits at every timestep.
class Model {
 public:
  // Builds a named preset with parameters drawn from U(-1/sqrt(fan_in),
  // 1/sqrt(fan_in)):
  //   mlp-small: flatten -> linear(hidden) -> lif -> readout
  //   cnn-small: conv 16 -> lif -> pool 2 -> conv 32 -> lif -> pool 2 ->
  //              flatten -> readout
  static Model build(const ModelSpec& spec, std::uint64_t seed);

  // Validates that consecutive layer shapes are compatible.
  Model(ModelSpec spec, std::vector<Layer> layers, LinearLayer readout);

  // Copies share parameter storage; clone() does not.
  Model clone() const;

  const ModelSpec& spec() const { return spec_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const LinearLayer& readout() const { return readout_; }

  // Trainable tensors in layer order, readout last (weight before bias).
  std::vector<Tensor> parameters() const;
  std::size_t parameter_count() const;
  std::size_t lif_layer_count() const;

  // Fresh states for a batch, one per lif layer.
  std::vector<LifState> initial_states(std::size_t batch) const;

  // One pass through every layer for input x_t [B, ...]; lif layers consume
  // and replace their state. Returns un-normalized logits [B, C].
  Tensor forward_timestep(Tape& tape, const Tensor& x_t,
                          std::vector<LifState>& states) const;

  // Runs T = inputs.dim(0) steps from reset states.
  TemporalOutput unroll(Tape& tape, const Tensor& inputs) const;

 private:
  ModelSpec spec_;
  std::vector<Layer> layers_;
  LinearLayer readout_;
  std::vector<Shape> lif_shapes_;  // per-sample state shape of each lif layer
};

// Constant-current encoding: image [B, ...] repeated T times -> [T, B, ...].
Tensor encode_static(const Tensor& image, std::size_t T);

}  // namespace tks
