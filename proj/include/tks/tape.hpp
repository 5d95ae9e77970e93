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
#include <functional>
#include <vector>

#include "tks/tensor.hpp"

namespace tks {

// Records differentiable operations in execution order and replays their
// backward rules in reverse.
//
// A tape is a single-threaded unit of work. Recording is skipped when no
// input tracks gradients, or when the tape was created with
// Tape::inference().
class Tape {
 public:
  // Receives the node's output (whose grad() is populated) and its inputs.
  // Implementations add their contribution with accumulate_grad().
  using BackwardFn =
      std::function<void(const Tensor& output, std::vector<Tensor>& inputs)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  ~Tape() { reset(); }

  static Tape inference() {
    Tape t;
    t.enabled_ = false;
    return t;
  }

  bool enabled() const { return enabled_; }

  // True if an op over these inputs should be recorded.
  bool should_record(std::initializer_list<const Tensor*> inputs) const;

  void record(std::vector<Tensor> inputs, Tensor& output, BackwardFn backward);

  // d(loss)/d(x) for every tensor on the loss's provenance. Leaf gradients
  // accumulate into existing slots. May run once per reset().
  void backward(const Tensor& loss);

  void reset();
  std::size_t size() const { return nodes_.size(); }

 private:
  Tape(Tape&&) = default;

  struct Node {
    std::vector<Tensor> inputs;
    Tensor output;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool enabled_ = true;
  bool consumed_ = false;
};

inline void backward(const Tensor& loss, Tape& tape) { tape.backward(loss); }

// grad(t) += delta, allocating the slot if needed. No-op when t does not
// track gradients.
void accumulate_grad(Tensor& t, std::span<const float> delta);

}  // namespace tks
