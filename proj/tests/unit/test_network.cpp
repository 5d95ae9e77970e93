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

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tks/error.hpp"
#include "tks/network.hpp"

using namespace tks;

namespace {

LinearLayer Linear(std::size_t in, std::size_t out, std::vector<float> w, std::vector<float> b) {
  return LinearLayer{in, out, Tensor::from({in, out}, std::move(w), true),
                     Tensor::from({out}, std::move(b), true)};
}

ModelSpec Spec(Shape input, std::size_t classes, std::size_t hidden = 8) {
  ModelSpec s;
  s.input_shape = std::move(input);
  s.classes = classes;
  s.hidden = hidden;
  return s;
}

Tensor RandomInputs(Shape shape, std::uint64_t seed, float lo = 0.0f, float hi = 2.0f) {
  std::mt19937_64 rng(seed);
  const std::size_t n = shape_numel(shape);
  return Tensor::from(std::move(shape), oracle::RandomFloats(n, rng, lo, hi));
}

}  // namespace

TEST_SUITE("network") {
  TEST_CASE("identity readout passes the input through") {
    Model m(Spec({2}, 2), {}, Linear(2, 2, {1, 0, 0, 1}, {0, 0}));
    Tape tape = Tape::inference();
    auto states = m.initial_states(1);
    Tensor q = m.forward_timestep(tape, Tensor::from({1, 2}, {1, 0}), states);
    CHECK(q.at(0) == 1.0f);
    CHECK(q.at(1) == 0.0f);
  }

  TEST_CASE("zero weights give zero logits") {
    Model m(Spec({3}, 4), {Linear(3, 5, std::vector<float>(15, 0.0f), std::vector<float>(5, 0.0f)),
                          LifLayer{}},
            Linear(5, 4, std::vector<float>(20, 0.0f), std::vector<float>(4, 0.0f)));
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, RandomInputs({3, 2, 3}, 1));
    for (float x : out.q.data()) CHECK(x == 0.0f);
  }

  TEST_CASE("linear -> lif -> readout matches a hand unroll") {
    std::mt19937_64 rng(4);
    const std::size_t in = 3, hid = 4, cls = 2, T = 5;
    const auto w1 = oracle::RandomFloats(in * hid, rng), b1 = oracle::RandomFloats(hid, rng);
    const auto w2 = oracle::RandomFloats(hid * cls, rng), b2 = oracle::RandomFloats(cls, rng);
    Model m(Spec({in}, cls), {Linear(in, hid, w1, b1), LifLayer{}}, Linear(hid, cls, w2, b2));
    const Tensor x = RandomInputs({T, 1, in}, 8);
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, x);

    std::vector<double> v(hid, 0.0), s(hid, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < hid; ++j) {
        double current = b1[j];
        for (std::size_t i = 0; i < in; ++i) current += x.at(t * in + i) * w1[i * hid + j];
        v[j] = 0.5 * v[j] * (1.0 - s[j]) + 0.5 * current;
        s[j] = v[j] >= 0.5 ? 1.0 : 0.0;
      }
      for (std::size_t c = 0; c < cls; ++c) {
        double logit = b2[c];
        for (std::size_t j = 0; j < hid; ++j) logit += s[j] * w2[j * cls + c];
        CHECK(out.q.at(t * cls + c) == doctest::Approx(logit).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("unroll output invariants") {
    const Model m = Model::build(Spec({6}, 3, 16), 11);
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, RandomInputs({7, 5, 6}, 2));
    REQUIRE(out.q.shape() == Shape{7, 5, 3});
    REQUIRE(out.o.shape() == Shape{5, 3});
    for (std::size_t r = 0; r < 7 * 5; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 3; ++c) sum += out.v.at(r * 3 + c);
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
    for (std::size_t b = 0; b < 5; ++b) {
      double sum = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        sum += out.o.at(b * 3 + c);
        double mean = 0.0;
        for (std::size_t t = 0; t < 7; ++t) mean += out.v.at((t * 5 + b) * 3 + c);
        CHECK(out.o.at(b * 3 + c) == doctest::Approx(mean / 7).epsilon(1e-6));
      }
      CHECK(std::abs(sum - 1.0) <= 1e-6);
    }
  }

  TEST_CASE("T = 1 gives o = v[0]; T = 0 is rejected") {
    const Model m = Model::build(Spec({4}, 3), 1);
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, RandomInputs({1, 2, 4}, 3));
    for (std::size_t i = 0; i < 6; ++i) CHECK(out.o.at(i) == out.v.at(i));
    CHECK_THROWS_AS(m.unroll(tape, Tensor::zeros({0, 2, 4})), ParameterError);
  }

  TEST_CASE("a stateless model is time invariant") {
    Model m(Spec({2}, 2), {}, Linear(2, 2, {1, 2, 3, 4}, {0.5f, -0.5f}));
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, encode_static(RandomInputs({3, 2}, 5), 4));
    for (std::size_t t = 1; t < 4; ++t)
      for (std::size_t i = 0; i < 6; ++i) CHECK(out.q.at(t * 6 + i) == out.q.at(i));
    for (std::size_t i = 0; i < 6; ++i) CHECK(out.o.at(i) == doctest::Approx(out.v.at(i)));
  }

  TEST_CASE("encode_static repeats the image") {
    const Tensor img = Tensor::from({2, 2}, {1, 2, 3, 4});
    const Tensor e = encode_static(img, 3);
    CHECK(e.shape() == Shape{3, 2, 2});
    for (std::size_t t = 0; t < 3; ++t)
      for (std::size_t i = 0; i < 4; ++i) CHECK(e.at(t * 4 + i) == img.at(i));
    CHECK(encode_static(img, 1).shape() == Shape{1, 2, 2});
    CHECK_THROWS_AS(encode_static(img, 0), ParameterError);
  }

  TEST_CASE("membrane state makes equal inputs give different logits") {
    // One neuron, input 0.6: v = 0.3 (silent), then 0.45 (silent), then
    // 0.525 (fires), so the readout changes at t = 2.
    Model m(Spec({1}, 1), {Linear(1, 1, {1}, {0}), LifLayer{}}, Linear(1, 1, {1}, {0}));
    Tape tape = Tape::inference();
    const TemporalOutput out = m.unroll(tape, encode_static(Tensor::from({1, 1}, {0.6f}), 3));
    CHECK(out.q.at(0) == 0.0f);
    CHECK(out.q.at(1) == 0.0f);
    CHECK(out.q.at(2) == 1.0f);

    const Model big = Model::build(Spec({6}, 4, 32), 3);
    const TemporalOutput o2 = big.unroll(tape, encode_static(RandomInputs({2, 6}, 7, 0.0f, 3.0f), 2));
    bool differs = false;
    for (std::size_t i = 0; i < 8; ++i) differs |= o2.q.at(i) != o2.q.at(8 + i);
    CHECK(differs);
  }

  TEST_CASE("future steps cannot change past outputs") {
    const Model m = Model::build(Spec({5}, 3, 12), 9);
    const Tensor x = RandomInputs({8, 3, 5}, 10);
    Tape tape = Tape::inference();
    const TemporalOutput full = m.unroll(tape, x);
    for (std::size_t tp : {1, 3, 6}) {
      std::vector<float> prefix(x.data().begin(), x.data().begin() + tp * 15);
      const TemporalOutput part = m.unroll(tape, Tensor::from({tp, 3, 5}, prefix));
      for (std::size_t i = 0; i < tp * 9; ++i) CHECK(part.q.at(i) == full.q.at(i));
    }
  }

  TEST_CASE("duplicating a sample in the batch gives identical outputs") {
    const Model m = Model::build(Spec({4}, 3, 10), 12);
    const Tensor one = RandomInputs({5, 1, 4}, 13);
    std::vector<float> twice;
    for (std::size_t t = 0; t < 5; ++t)
      for (int rep = 0; rep < 2; ++rep)
        twice.insert(twice.end(), one.data().begin() + t * 4, one.data().begin() + (t + 1) * 4);
    Tape tape = Tape::inference();
    const TemporalOutput a = m.unroll(tape, one);
    const TemporalOutput b = m.unroll(tape, Tensor::from({5, 2, 4}, twice));
    for (std::size_t t = 0; t < 5; ++t)
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(b.q.at((t * 2) * 3 + c) == a.q.at(t * 3 + c));
        CHECK(b.q.at((t * 2 + 1) * 3 + c) == a.q.at(t * 3 + c));
      }
  }

  TEST_CASE("presets build and run") {
    const Model mlp = Model::build(Spec({1, 4, 4}, 10, 128), 0);
    CHECK(mlp.lif_layer_count() == 1);
    CHECK(mlp.parameter_count() == 16 * 128 + 128 + 128 * 10 + 10);
    ModelSpec cs = Spec({2, 8, 8}, 5);
    cs.preset = "cnn-small";
    const Model cnn = Model::build(cs, 0);
    CHECK(cnn.lif_layer_count() == 2);
    CHECK(cnn.parameter_count() ==
          (16 * 2 * 9 + 16) + (32 * 16 * 9 + 32) + (32 * 2 * 2 * 5 + 5));
    Tape tape = Tape::inference();
    const TemporalOutput out = cnn.unroll(tape, RandomInputs({3, 2, 2, 8, 8}, 1));
    CHECK(out.q.shape() == Shape{3, 2, 5});
    ModelSpec bad = cs;
    bad.preset = "resnet";
    CHECK_THROWS_AS(Model::build(bad, 0), ConfigError);
  }

  TEST_CASE("build is deterministic per seed and clone is independent") {
    const Model a = Model::build(Spec({3}, 2), 5);
    const Model b = Model::build(Spec({3}, 2), 5);
    const Model c = Model::build(Spec({3}, 2), 6);
    auto flat = [](const Model& m) {
      std::vector<float> out;
      for (const Tensor& p : m.parameters()) out.insert(out.end(), p.data().begin(), p.data().end());
      return out;
    };
    CHECK(flat(a) == flat(b));
    CHECK(flat(a) != flat(c));
    const Model d = a.clone();
    Tensor w = d.parameters()[0];
    w.mutable_data()[0] += 1.0f;
    CHECK(flat(a) == flat(b));
  }

  TEST_CASE("shape errors") {
    const Model m = Model::build(Spec({3}, 2), 0);
    Tape tape = Tape::inference();
    auto states = m.initial_states(2);
    CHECK_THROWS_AS(m.forward_timestep(tape, Tensor::zeros({2, 4}), states), DimensionError);
    std::vector<LifState> none;
    CHECK_THROWS_AS(m.forward_timestep(tape, Tensor::zeros({2, 3}), none), ContractError);
    auto wrong = m.initial_states(3);
    CHECK_THROWS_AS(m.forward_timestep(tape, Tensor::zeros({2, 3}), wrong), ContractError);
    CHECK_THROWS_AS(Model(Spec({3}, 2), {}, Linear(4, 2, std::vector<float>(8), {0, 0})),
                    DimensionError);
  }
}
