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
#include "tks/lif.hpp"
#include "tks/ops.hpp"

using namespace tks;

namespace {

LifState State(std::vector<float> v, std::vector<float> s) {
  const Shape shape{1, v.size()};
  return {Tensor::from(shape, std::move(v)), Tensor::from(shape, std::move(s))};
}

}  // namespace

TEST_SUITE("lif") {
  TEST_CASE("single-step examples") {
    const LifConfig cfg;  // tau 2, v_th 0.5, v_rest 0
    const SurrogateSpec sg;
    Tape tape;
    {
      auto [next, s] = lif_step(tape, State({0}, {0}), Tensor::from({1, 1}, {1}), cfg, sg);
      CHECK(next.v.at(0) == 0.5f);
      CHECK(s.at(0) == 1.0f);
      CHECK(next.s_prev.same_storage(s));
    }
    {
      auto [next, s] = lif_step(tape, State({0.4f}, {1}), Tensor::from({1, 1}, {0}), cfg, sg);
      CHECK(next.v.at(0) == 0.0f);
      CHECK(s.at(0) == 0.0f);
    }
  }

  TEST_CASE("zero input from reset never spikes") {
    const LifConfig cfg;
    LifState st = reset_state(2, 3, cfg);
    Tape tape;
    for (int t = 0; t < 20; ++t) {
      auto [next, s] = lif_step(tape, st, Tensor::zeros({2, 3}), cfg, SurrogateSpec{});
      for (float x : s.data()) CHECK(x == 0.0f);
      for (float x : next.v.data()) CHECK(x == 0.0f);
      st = next;
    }
  }

  TEST_CASE("reset_state") {
    LifState st = reset_state(2, 3, LifConfig{});
    CHECK(st.v.shape() == Shape{2, 3});
    CHECK(st.s_prev.shape() == Shape{2, 3});
    for (float x : st.v.data()) CHECK(x == 0.0f);
    for (float x : st.s_prev.data()) CHECK(x == 0.0f);
    LifConfig shifted;
    shifted.v_rest = -0.25f;
    const LifState rest = reset_state(1, 4, shifted);
    for (float x : rest.v.data()) CHECK(x == -0.25f);
    CHECK_THROWS_AS(reset_state(0, 3, LifConfig{}), ParameterError);
    CHECK_THROWS_AS(reset_state(2, 0, LifConfig{}), ParameterError);
  }

  TEST_CASE("config validation") {
    LifConfig c;
    c.tau_m = 1.0f;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = LifConfig{};
    c.v_rest = 0.5f;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    CHECK_NOTHROW(LifConfig{}.validate());
  }

  TEST_CASE("shape mismatch is a dimension error") {
    Tape tape;
    CHECK_THROWS_AS(lif_step(tape, reset_state(1, 3, LifConfig{}), Tensor::zeros({1, 4}),
                             LifConfig{}, SurrogateSpec{}),
                    DimensionError);
  }

  TEST_CASE("membrane magnitude contracts without input") {
    std::mt19937_64 rng(1);
    const LifConfig cfg{3.0f, 5.0f, 0.0f, false};
    LifState st = State(oracle::RandomFloats(16, rng, -4.0f, 4.0f), std::vector<float>(16, 0.0f));
    Tape tape;
    for (int t = 0; t < 10; ++t) {
      auto [next, s] = lif_step(tape, st, Tensor::zeros({1, 16}), cfg, SurrogateSpec{});
      for (std::size_t i = 0; i < 16; ++i) {
        CHECK(std::fabs(next.v.at(i)) <= std::fabs(st.v.at(i)));
      }
      st = next;
    }
  }

  TEST_CASE("constant input >= 1 spikes every step") {
    const LifConfig cfg;
    for (float current : {1.0f, 1.5f, 40.0f}) {
      LifState st = reset_state(1, 1, cfg);
      Tape tape;
      for (int t = 0; t < 12; ++t) {
        auto [next, s] = lif_step(tape, st, Tensor::full({1, 1}, current), cfg, SurrogateSpec{});
        CHECK(s.at(0) == 1.0f);
        st = next;
      }
    }
  }

  TEST_CASE("spikes are binary for any magnitude") {
    std::mt19937_64 rng(2);
    LifState st = reset_state(1, 64, LifConfig{});
    Tape tape;
    for (int t = 0; t < 5; ++t) {
      auto in = oracle::RandomFloats(64, rng, -1e6f, 1e6f);
      auto [next, s] = lif_step(tape, st, Tensor::from({1, 64}, in), LifConfig{}, SurrogateSpec{});
      for (float x : s.data()) CHECK((x == 0.0f || x == 1.0f));
      st = next;
    }
  }

  TEST_CASE("nonzero v_rest replaces the carried potential") {
    const LifConfig cfg{2.0f, 0.5f, -0.2f, false};
    Tape tape;
    auto [fired, s1] = lif_step(tape, State({0.9f}, {1}), Tensor::from({1, 1}, {0.0f}), cfg,
                                SurrogateSpec{});
    CHECK(fired.v.at(0) == doctest::Approx(0.5 * -0.2));
    auto [quiet, s2] = lif_step(tape, State({0.3f}, {0}), Tensor::from({1, 1}, {0.2f}), cfg,
                                SurrogateSpec{});
    CHECK(quiet.v.at(0) == doctest::Approx(0.5 * 0.3 + 0.5 * 0.2));
  }

  TEST_CASE("detach_reset changes gradients, never forward values") {
    std::mt19937_64 rng(9);
    const auto in1 = oracle::RandomFloats(2 * 8, rng, 0.0f, 2.0f);
    const auto in2 = oracle::RandomFloats(2 * 8, rng, 0.0f, 2.0f);
    std::vector<std::vector<float>> grads;
    std::vector<std::vector<float>> outs;
    for (bool detach : {false, true}) {
      LifConfig cfg;
      cfg.detach_reset = detach;
      Tensor x1 = Tensor::from({2, 8}, in1, true);
      Tensor x2 = Tensor::from({2, 8}, in2, true);
      Tape tape;
      LifState st = reset_state(2, 8, cfg);
      auto [a, s1] = lif_step(tape, st, x1, cfg, SurrogateSpec{});
      auto [b, s2] = lif_step(tape, a, x2, cfg, SurrogateSpec{});
      auto [c, s3] = lif_step(tape, b, x2, cfg, SurrogateSpec{});
      tape.backward(ops::sum(tape, ops::add(tape, c.v, s3)));
      outs.push_back({c.v.data().begin(), c.v.data().end()});
      outs.back().insert(outs.back().end(), s3.data().begin(), s3.data().end());
      grads.push_back({x1.grad().begin(), x1.grad().end()});
    }
    CHECK(outs[0] == outs[1]);
    CHECK(grads[0] != grads[1]);
  }

  TEST_CASE("gradient through one step matches the recurrence derivative") {
    // v' = leak * v * (1 - s) + inv_tau * I, so dv'/dI = inv_tau, dv'/dv = leak * (1 - s)
    // and dv'/ds = -leak * v.
    const LifConfig cfg{4.0f, 0.5f, 0.0f, false};
    Tensor v = Tensor::from({1, 2}, {0.3f, 0.7f}, true);
    Tensor s = Tensor::from({1, 2}, {0.0f, 1.0f}, true);
    Tensor i = Tensor::from({1, 2}, {0.1f, -0.2f}, true);
    Tape tape;
    auto [next, spikes] = lif_step(tape, LifState{v, s}, i, cfg, SurrogateSpec{});
    tape.backward(ops::sum(tape, next.v));
    CHECK(i.grad()[0] == 0.25f);
    CHECK(i.grad()[1] == 0.25f);
    CHECK(v.grad()[0] == 0.75f);
    CHECK(v.grad()[1] == 0.0f);
    CHECK(s.grad()[0] == doctest::Approx(-0.75 * 0.3));
    CHECK(s.grad()[1] == doctest::Approx(-0.75 * 0.7));
  }
}
