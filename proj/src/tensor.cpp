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

#include "tks/tensor.hpp"

#include <algorithm>
#include <sstream>

#include "tks/error.hpp"

namespace tks {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0f, requires_grad);
}

Tensor Tensor::full(Shape shape, float value, bool requires_grad) {
  auto impl = std::make_shared<Impl>();
  impl->data.assign(shape_numel(shape), value);
  impl->shape = std::move(shape);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::from(Shape shape, std::vector<float> values,
                    bool requires_grad) {
  if (shape_numel(shape) != values.size()) {
    throw DimensionError("tensor shape " + shape_string(shape) + " holds " +
                         std::to_string(shape_numel(shape)) +
                         " values, got " + std::to_string(values.size()));
  }
  auto impl = std::make_shared<Impl>();
  impl->shape = std::move(shape);
  impl->data = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(float value) { return from({1}, {value}); }

Tensor::Impl& Tensor::impl() const {
  if (!impl_) throw ContractError("use of an undefined tensor");
  return *impl_;
}

const Shape& Tensor::shape() const { return impl().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) {
    throw DimensionError("axis " + std::to_string(axis) +
                         " out of range for shape " + shape_string(s));
  }
  return s[axis];
}

std::size_t Tensor::numel() const { return impl().data.size(); }

std::span<const float> Tensor::data() const { return impl().data; }

std::span<float> Tensor::mutable_data() { return impl().data; }

float Tensor::item() const {
  if (numel() != 1) {
    throw ContractError("item() on a tensor of shape " +
                        shape_string(shape()));
  }
  return impl().data[0];
}

bool Tensor::requires_grad() const { return impl().requires_grad; }

void Tensor::set_requires_grad(bool value) { impl().requires_grad = value; }

bool Tensor::has_grad() const { return !impl().grad.empty(); }

std::span<const float> Tensor::grad() const { return impl().grad; }

std::span<float> Tensor::mutable_grad() {
  Impl& i = impl();
  if (i.grad.empty()) i.grad.assign(i.data.size(), 0.0f);
  return i.grad;
}

void Tensor::zero_grad() {
  Impl& i = impl();
  std::fill(i.grad.begin(), i.grad.end(), 0.0f);
}

void Tensor::clear_grad() {
  Impl& i = impl();
  i.grad.clear();
  i.grad.shrink_to_fit();
}

bool Tensor::tracks_grad() const {
  const Impl& i = impl();
  return i.requires_grad || i.node != kNoNode;
}

Tensor Tensor::detach() const {
  const Impl& i = impl();
  return from(i.shape, i.data);
}

Tensor Tensor::clone() const {
  Tensor t = detach();
  t.impl().requires_grad = impl().requires_grad;
  return t;
}

}  // namespace tks
