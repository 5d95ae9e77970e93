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
#include "tks/data.hpp"
#include "tks/error.hpp"
#include "tks/evaluation.hpp"
#include "tks/network.hpp"

using namespace tks;

namespace {

Tensor Rows(std::size_t b, std::size_t c, std::vector<float> values) {
  return Tensor::from({b, c}, std::move(values));
}

double Aurc(const std::vector<float>& conf, const std::vector<std::uint8_t>& ok) {
  return aurc(conf, ok);
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("argmax ties go to the smaller index") {
    const std::vector<float> r{0.2f, 0.4f, 0.4f};
    CHECK(argmax(r) == 1);
    const std::vector<float> same{1, 1};
    CHECK(argmax(same) == 0);
  }

  TEST_CASE("top1 examples") {
    const Tensor o = Rows(4, 2, {1, 0, 0, 1, 1, 0, 0, 1});
    CHECK(top1_accuracy(o, std::vector<int>{0, 1, 0, 1}) == 1.0);
    CHECK(top1_accuracy(o, std::vector<int>{1, 0, 1, 0}) == 0.0);
    CHECK(top1_accuracy(o, std::vector<int>{0, 1, 0, 0}) == 0.75);
    CHECK_THROWS_AS(top1_accuracy(o, std::vector<int>{0, 1}), DimensionError);
    CHECK_THROWS_AS(top1_accuracy(o, std::vector<int>{0, 1, 0, 2}), DataError);
  }

  TEST_CASE("aurc examples") {
    CHECK(Aurc({0.9f, 0.8f, 0.7f}, {1, 1, 1}) == 0.0);
    CHECK(Aurc({0.9f, 0.8f, 0.7f}, {0, 0, 0}) == 1.0);
    CHECK(Aurc({0.9f, 0.6f}, {1, 0}) == 0.25);
    CHECK(Aurc({0.6f, 0.9f}, {0, 1}) == 0.25);
    // Equal confidence: index order decides.
    CHECK(Aurc({0.5f, 0.5f}, {0, 1}) == doctest::Approx((1.0 + 0.5) / 2));
    CHECK_THROWS_AS(Aurc({}, {}), ParameterError);
    CHECK_THROWS_AS(Aurc({0.5f}, {1, 0}), DimensionError);
  }

  TEST_CASE("aurc matches the quadratic prefix oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + (trial * 97) % 1000;
      std::uniform_int_distribution<int> level(0, 20);  // coarse values force ties
      std::bernoulli_distribution hit(0.7);
      std::vector<float> conf(n);
      std::vector<std::uint8_t> ok(n);
      for (std::size_t i = 0; i < n; ++i) {
        conf[i] = static_cast<float>(level(rng)) / 20.0f;
        ok[i] = hit(rng);
      }
      CHECK(Aurc(conf, ok) == oracle::BruteAurc(conf, ok));
      const double a = Aurc(conf, ok);
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }

  TEST_CASE("aurc only depends on confidence order") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 200;
      auto conf = oracle::RandomFloats(n, rng, 0.0f, 1.0f);
      std::vector<std::uint8_t> ok(n);
      std::bernoulli_distribution hit(0.5);
      for (auto& x : ok) x = hit(rng);
      std::vector<float> mapped(n);
      for (std::size_t i = 0; i < n; ++i) mapped[i] = std::exp(3.0f * conf[i]) - 7.0f;
      CHECK(Aurc(conf, ok) == Aurc(mapped, ok));
    }
  }

  TEST_CASE("per-timestep accuracy") {
    // T = 2, B = 3, C = 2
    const Tensor v = Tensor::from({2, 3, 2}, {0.9f, 0.1f, 0.2f, 0.8f, 0.6f, 0.4f,
                                              0.3f, 0.7f, 0.2f, 0.8f, 0.1f, 0.9f});
    const std::vector<int> y{0, 1, 1};
    const auto acc = per_timestep_accuracy(v, y);
    REQUIRE(acc.size() == 2);
    CHECK(acc[0] == doctest::Approx(2.0 / 3));
    CHECK(acc[1] == doctest::Approx(2.0 / 3));

    std::mt19937_64 rng(23);
    const auto vals = oracle::RandomFloats(5 * 40 * 4, rng, 0, 1);
    std::vector<int> labels(40);
    for (std::size_t b = 0; b < 40; ++b) labels[b] = static_cast<int>(b % 4);
    const auto got = per_timestep_accuracy(Tensor::from({5, 40, 4}, vals), labels);
    for (std::size_t t = 0; t < 5; ++t) {
      std::size_t hits = 0;
      for (std::size_t b = 0; b < 40; ++b) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < 4; ++c)
          if (vals[(t * 40 + b) * 4 + c] > vals[(t * 40 + b) * 4 + best]) best = c;
        hits += best == static_cast<std::size_t>(labels[b]);
      }
      CHECK(got[t] == static_cast<double>(hits) / 40);
    }

    const Tensor one = Tensor::from({1, 3, 2}, {0.9f, 0.1f, 0.2f, 0.8f, 0.6f, 0.4f});
    CHECK(per_timestep_accuracy(one, y)[0] == top1_accuracy(Rows(3, 2, {0.9f, 0.1f, 0.2f, 0.8f, 0.6f, 0.4f}), y));
  }

  TEST_CASE("per-class accuracy") {
    const std::vector<int> y{0, 1, 2, 0};
    const Tensor perfect = Rows(4, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 0});
    for (const auto& a : per_class_accuracy(perfect, y, 3)) CHECK(*a == 1.0);
    const Tensor zero = Rows(4, 3, {1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0});
    const auto c = per_class_accuracy(zero, y, 3);
    CHECK(*c[0] == 1.0);
    CHECK(*c[1] == 0.0);
    CHECK(*c[2] == 0.0);
    const Tensor wide = Rows(4, 4, {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0});
    const auto absent = per_class_accuracy(wide, y, 4);
    CHECK(*absent[2] == 1.0);
    CHECK_FALSE(absent[3].has_value());

    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t B = 37, C = 5;
      const Tensor o = Tensor::from({B, C}, oracle::RandomFloats(B * C, rng, 0, 1));
      std::vector<int> labels(B);
      std::uniform_int_distribution<int> cls(0, C - 1);
      for (auto& l : labels) l = cls(rng);
      const auto per = per_class_accuracy(o, labels, C);
      double weighted = 0.0;
      for (std::size_t k = 0; k < C; ++k) {
        const auto n = std::count(labels.begin(), labels.end(), static_cast<int>(k));
        if (per[k]) weighted += *per[k] * static_cast<double>(n);
      }
      CHECK(std::abs(weighted / B - top1_accuracy(o, labels)) <= 1e-9);
      const auto conf = confusion_matrix(o, labels, C);
      std::size_t total = 0, diag = 0;
      for (std::size_t i = 0; i < C; ++i)
        for (std::size_t j = 0; j < C; ++j) {
          total += conf[i][j];
          if (i == j) diag += conf[i][j];
        }
      CHECK(total == B);
      CHECK(static_cast<double>(diag) / B == top1_accuracy(o, labels));
    }
  }

  TEST_CASE("evaluate and sweep") {
    SynthSpec s;
    s.n_per_class = 8;
    s.classes = 4;
    s.T = 5;
    const Dataset data = synth_temporal(s);
    ModelSpec spec;
    spec.input_shape = data.frame_shape();
    spec.classes = 4;
    spec.hidden = 16;
    const Model m = Model::build(spec, 2);

    const EvalReport r = evaluate(m, data, 5, 7);
    CHECK(r.T == 5);
    CHECK(r.samples == 32);
    CHECK(r.per_timestep_acc.size() == 5);
    CHECK(r.per_class_acc.size() == 4);
    CHECK(r.top1 >= 0.0);
    CHECK(r.top1 <= 1.0);
    CHECK(r.aurc >= 0.0);
    CHECK(r.aurc <= 1000.0);

    // Batch size must not change the answer.
    const EvalReport whole = evaluate(m, data, 5, 1000);
    CHECK(to_json(whole) == to_json(r));

    const std::size_t ts[] = {1, 2, 5, 8};
    const auto sweep = timestep_sweep(m, data, ts);
    CHECK(sweep.size() == 4);
    CHECK(to_json(sweep.at(5)) == to_json(evaluate(m, data, 5)));
    CHECK(sweep.at(8).per_timestep_acc.size() == 8);
    // Steps past the stored length wrap, so the first five agree.
    for (std::size_t t = 0; t < 5; ++t)
      CHECK(sweep.at(8).per_timestep_acc[t] == sweep.at(5).per_timestep_acc[t]);
    CHECK(sweep.at(1).per_timestep_acc[0] == sweep.at(5).per_timestep_acc[0]);

    const std::string csv = sweep_csv(sweep);
    CHECK(csv.rfind("T_test,top1,aurc\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK_THROWS_AS(evaluate(m, data, 0), ParameterError);
  }

  TEST_CASE("stateless model has equal per-timestep accuracy on static input") {
    ModelSpec spec;
    spec.input_shape = {3};
    spec.classes = 2;
    Model m(spec, {}, LinearLayer{3, 2, Tensor::from({3, 2}, {1, -1, 0.5f, 0.2f, -0.3f, 0.4f}),
                                  Tensor::from({2}, {0, 0})});
    Dataset d;
    std::mt19937_64 rng(25);
    d.inputs = Tensor::from({20, 3}, oracle::RandomFloats(60, rng));
    for (int i = 0; i < 20; ++i) d.labels.push_back(i % 2);
    d.class_count = 2;
    const EvalReport r = evaluate(m, d, 4);
    for (double a : r.per_timestep_acc) CHECK(a == r.per_timestep_acc[0]);
    CHECK(r.top1 == r.per_timestep_acc[0]);
  }
}
