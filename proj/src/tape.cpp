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

#include "tks/tape.hpp"

#include "tks/error.hpp"
#include "tks/kernels.hpp"

namespace tks {

bool Tape::should_record(std::initializer_list<const Tensor*> inputs) const {
  if (!enabled_) return false;
  for (const Tensor* t : inputs) {
    if (t->tracks_grad()) return true;
  }
  return false;
}

void Tape::record(std::vector<Tensor> inputs, Tensor& output,
                  BackwardFn backward) {
  if (!enabled_) return;
  if (consumed_) {
    throw TapeError("recording on a tape whose backward pass already ran; "
                    "call reset() first");
  }
  Tensor::Impl& out = output.impl();
  out.tape = this;
  out.node = nodes_.size();
  nodes_.push_back(Node{std::move(inputs), output, std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
  if (loss.numel() != 1) {
    throw ContractError("backward needs a scalar loss, got shape " +
                        shape_string(loss.shape()));
  }
  if (consumed_) {
    throw TapeError("backward already ran on this tape; call reset() first");
  }
  const Tensor::Impl& li = loss.impl();
  if (li.tape != this || li.node >= nodes_.size() ||
      !nodes_[li.node].output.same_storage(loss)) {
    throw TapeError("loss has no recorded provenance on this tape");
  }
  consumed_ = true;

  Tensor seed = loss;
  seed.mutable_grad()[0] = 1.0f;
  for (std::size_t i = li.node + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.output.has_grad()) continue;  // not on the loss's path
    node.backward(node.output, node.inputs);
  }
}

void Tape::reset() {
  for (Node& n : nodes_) {
    Tensor::Impl& out = n.output.impl();
    out.tape = nullptr;
    out.node = Tensor::kNoNode;
  }
  nodes_.clear();
  consumed_ = false;
}

void accumulate_grad(Tensor& t, std::span<const float> delta) {
  if (!t.tracks_grad()) return;
  if (delta.size() != t.numel()) {
    throw DimensionError("gradient of size " + std::to_string(delta.size()) +
                         " for tensor of shape " + shape_string(t.shape()));
  }
  std::span<float> g = t.mutable_grad();
  kernels::active().accumulate(g.size(), delta.data(), g.data());
}

}  // namespace tks
