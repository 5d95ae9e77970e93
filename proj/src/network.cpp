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

#include "tks/network.hpp"

#include <cmath>
#include <random>

#include "tks/error.hpp"
#include "tks/ops.hpp"
#include "tks/tks_core.hpp"

namespace tks {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Tensor UniformTensor(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
  std::uniform_real_distribution<float> dist(-bound, bound);
  std::vector<float> values(shape_numel(shape));
  for (float& v : values) v = dist(rng);
  return Tensor::from(std::move(shape), std::move(values), true);
}

LinearLayer MakeLinear(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  LinearLayer l{in, out, {}, {}};
  l.weight = UniformTensor({in, out}, in, rng);
  l.bias = UniformTensor({out}, in, rng);
  return l;
}

Conv2dLayer MakeConv(std::size_t in, std::size_t out, std::size_t kernel,
                     std::mt19937_64& rng) {
  Conv2dLayer c{in, out, kernel, 1, kernel / 2, {}, {}};
  const std::size_t fan_in = in * kernel * kernel;
  c.weight = UniformTensor({out, in, kernel, kernel}, fan_in, rng);
  c.bias = UniformTensor({out}, fan_in, rng);
  return c;
}

std::string ShapeMismatch(const std::string& what, const Shape& got) {
  return "model build: " + what + " cannot accept per-sample shape " +
         shape_string(got);
}

Shape WithBatch(std::size_t batch, const Shape& s) {
  Shape out{batch};
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

}  // namespace

std::string layer_kind(const Layer& layer) {
  return std::visit(Overloaded{
                        [](const LinearLayer&) { return std::string("linear"); },
                        [](const Conv2dLayer&) { return std::string("conv2d"); },
                        [](const AvgPool2dLayer&) { return std::string("avgpool2d"); },
                        [](const FlattenLayer&) { return std::string("flatten"); },
                        [](const LifLayer&) { return std::string("lif"); },
                    },
                    layer);
}

Model Model::build(const ModelSpec& spec, std::uint64_t seed) {
  spec.lif.validate();
  spec.surrogate.validate();
  if (spec.classes < 1) throw ParameterError("model needs at least one class");
  if (spec.input_shape.empty() || shape_numel(spec.input_shape) == 0) {
    throw ParameterError("model input shape must be non-empty");
  }
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  LinearLayer readout;
  if (spec.preset == "mlp-small") {
    if (spec.hidden < 1) throw ParameterError("mlp-small hidden width must be positive");
    const std::size_t in = shape_numel(spec.input_shape);
    layers.emplace_back(FlattenLayer{});
    layers.emplace_back(MakeLinear(in, spec.hidden, rng));
    layers.emplace_back(LifLayer{spec.lif});
    readout = MakeLinear(spec.hidden, spec.classes, rng);
  } else if (spec.preset == "cnn-small") {
    if (spec.input_shape.size() != 3) {
      throw DimensionError("cnn-small needs [C, H, W] inputs, got " +
                           shape_string(spec.input_shape));
    }
    const std::size_t c = spec.input_shape[0];
    const std::size_t h = spec.input_shape[1] / 4;
    const std::size_t w = spec.input_shape[2] / 4;
    if (h == 0 || w == 0) {
      throw DimensionError("cnn-small needs inputs of at least 4x4, got " +
                           shape_string(spec.input_shape));
    }
    layers.emplace_back(MakeConv(c, 16, 3, rng));
    layers.emplace_back(LifLayer{spec.lif});
    layers.emplace_back(AvgPool2dLayer{2});
    layers.emplace_back(MakeConv(16, 32, 3, rng));
    layers.emplace_back(LifLayer{spec.lif});
    layers.emplace_back(AvgPool2dLayer{2});
    layers.emplace_back(FlattenLayer{});
    readout = MakeLinear(32 * h * w, spec.classes, rng);
  } else {
    throw ConfigError("unknown architecture preset '" + spec.preset +
                      "' (expected mlp-small or cnn-small)");
  }
  return Model(spec, std::move(layers), std::move(readout));
}

Model::Model(ModelSpec spec, std::vector<Layer> layers, LinearLayer readout)
    : spec_(std::move(spec)), layers_(std::move(layers)), readout_(std::move(readout)) {
  Shape shape = spec_.input_shape;
  for (const Layer& layer : layers_) {
    std::visit(
        Overloaded{
            [&](const LinearLayer& l) {
              if (shape.size() != 1 || shape[0] != l.in) {
                throw DimensionError(ShapeMismatch(
                    "linear(" + std::to_string(l.in) + ")", shape));
              }
              if (l.weight.shape() != Shape{l.in, l.out} ||
                  l.bias.shape() != Shape{l.out}) {
                throw DimensionError("model build: linear parameters have wrong shape");
              }
              shape = {l.out};
            },
            [&](const Conv2dLayer& c) {
              if (shape.size() != 3 || shape[0] != c.in_channels) {
                throw DimensionError(ShapeMismatch(
                    "conv2d(" + std::to_string(c.in_channels) + ")", shape));
              }
              if (c.weight.shape() !=
                      Shape{c.out_channels, c.in_channels, c.kernel, c.kernel} ||
                  c.bias.shape() != Shape{c.out_channels}) {
                throw DimensionError("model build: conv2d parameters have wrong shape");
              }
              if (c.stride == 0 || shape[1] + 2 * c.padding < c.kernel ||
                  shape[2] + 2 * c.padding < c.kernel) {
                throw DimensionError(ShapeMismatch("conv2d kernel", shape));
              }
              shape = {c.out_channels,
                       (shape[1] + 2 * c.padding - c.kernel) / c.stride + 1,
                       (shape[2] + 2 * c.padding - c.kernel) / c.stride + 1};
            },
            [&](const AvgPool2dLayer& p) {
              if (shape.size() != 3 || p.window == 0 || shape[1] < p.window ||
                  shape[2] < p.window) {
                throw DimensionError(ShapeMismatch("avgpool2d", shape));
              }
              shape = {shape[0], shape[1] / p.window, shape[2] / p.window};
            },
            [&](const FlattenLayer&) { shape = {shape_numel(shape)}; },
            [&](const LifLayer& l) {
              l.cfg.validate();
              lif_shapes_.push_back(shape);
            },
        },
        layer);
  }
  if (shape.size() != 1 || shape[0] != readout_.in) {
    throw DimensionError(ShapeMismatch("readout", shape));
  }
  if (readout_.out != spec_.classes ||
      readout_.weight.shape() != Shape{readout_.in, readout_.out} ||
      readout_.bias.shape() != Shape{readout_.out}) {
    throw DimensionError("model build: readout must map to " +
                         std::to_string(spec_.classes) + " classes");
  }
}

Model Model::clone() const {
  auto copy_param = [](const Tensor& t) { return t.clone(); };
  std::vector<Layer> layers;
  for (const Layer& layer : layers_) {
    layers.push_back(std::visit(
        Overloaded{
            [&](const LinearLayer& l) -> Layer {
              return LinearLayer{l.in, l.out, copy_param(l.weight), copy_param(l.bias)};
            },
            [&](const Conv2dLayer& c) -> Layer {
              Conv2dLayer out = c;
              out.weight = copy_param(c.weight);
              out.bias = copy_param(c.bias);
              return out;
            },
            [](const auto& other) -> Layer { return other; },
        },
        layer));
  }
  LinearLayer readout{readout_.in, readout_.out, copy_param(readout_.weight),
                      copy_param(readout_.bias)};
  return Model(spec_, std::move(layers), std::move(readout));
}

std::vector<Tensor> Model::parameters() const {
  std::vector<Tensor> params;
  for (const Layer& layer : layers_) {
    if (const auto* l = std::get_if<LinearLayer>(&layer)) {
      params.push_back(l->weight);
      params.push_back(l->bias);
    } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
      params.push_back(c->weight);
      params.push_back(c->bias);
    }
  }
  params.push_back(readout_.weight);
  params.push_back(readout_.bias);
  return params;
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& p : parameters()) n += p.numel();
  return n;
}

std::size_t Model::lif_layer_count() const { return lif_shapes_.size(); }

std::vector<LifState> Model::initial_states(std::size_t batch) const {
  std::vector<LifState> states;
  std::size_t i = 0;
  for (const Layer& layer : layers_) {
    if (const auto* l = std::get_if<LifLayer>(&layer)) {
      states.push_back(reset_state(WithBatch(batch, lif_shapes_[i++]), l->cfg));
    }
  }
  return states;
}

Tensor Model::forward_timestep(Tape& tape, const Tensor& x_t,
                               std::vector<LifState>& states) const {
  if (states.size() != lif_shapes_.size()) {
    throw ContractError("forward_timestep: " + std::to_string(states.size()) +
                        " states for " + std::to_string(lif_shapes_.size()) +
                        " lif layers");
  }
  if (x_t.rank() < 1) throw DimensionError("forward_timestep: input needs a batch axis");
  const std::size_t batch = x_t.dim(0);
  if (Shape(x_t.shape().begin() + 1, x_t.shape().end()) != spec_.input_shape) {
    throw DimensionError("forward_timestep: input " + shape_string(x_t.shape()) +
                         " does not match model input " +
                         shape_string(spec_.input_shape));
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].v.shape() != WithBatch(batch, lif_shapes_[i]) ||
        states[i].s_prev.shape() != states[i].v.shape()) {
      throw ContractError("forward_timestep: state " + std::to_string(i) +
                          " has shape " + shape_string(states[i].v.shape()) +
                          ", expected " +
                          shape_string(WithBatch(batch, lif_shapes_[i])));
    }
  }

  Tensor x = x_t;
  std::size_t lif_index = 0;
  for (const Layer& layer : layers_) {
    x = std::visit(
        Overloaded{
            [&](const LinearLayer& l) { return ops::linear(tape, x, l.weight, l.bias); },
            [&](const Conv2dLayer& c) {
              return ops::conv2d(tape, x, c.weight, c.bias, c.stride, c.padding);
            },
            [&](const AvgPool2dLayer& p) { return ops::avg_pool2d(tape, x, p.window); },
            [&](const FlattenLayer&) {
              return ops::reshape(tape, x, {batch, x.numel() / batch});
            },
            [&](const LifLayer& l) {
              auto [next, spikes] =
                  lif_step(tape, states[lif_index], x, l.cfg, spec_.surrogate);
              states[lif_index++] = std::move(next);
              return spikes;
            },
        },
        layer);
  }
  return ops::linear(tape, x, readout_.weight, readout_.bias);
}

TemporalOutput Model::unroll(Tape& tape, const Tensor& inputs) const {
  if (inputs.rank() < 2) {
    throw DimensionError("unroll: inputs must be [T, B, ...], got " +
                         shape_string(inputs.shape()));
  }
  const std::size_t steps = inputs.dim(0);
  if (steps == 0) throw ParameterError("unroll needs T >= 1");
  std::vector<LifState> states = initial_states(inputs.dim(1));
  std::vector<Tensor> logits;
  logits.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    logits.push_back(forward_timestep(tape, ops::select(tape, inputs, t), states));
  }
  Tensor q = ops::stack(tape, logits);
  Aggregated agg = aggregate_output(tape, q);
  return TemporalOutput{q, agg.v, agg.o};
}

Tensor encode_static(const Tensor& image, std::size_t T) {
  if (T == 0) throw ParameterError("encode_static needs T >= 1");
  Shape shape{T};
  shape.insert(shape.end(), image.shape().begin(), image.shape().end());
  std::vector<float> values;
  values.reserve(T * image.numel());
  for (std::size_t t = 0; t < T; ++t) {
    values.insert(values.end(), image.data().begin(), image.data().end());
  }
  return Tensor::from(std::move(shape), std::move(values));
}

}  // namespace tks
