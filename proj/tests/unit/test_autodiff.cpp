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
#include "tks/ops.hpp"
#include "tks/surrogate.hpp"
#include "tks/tape.hpp"

using namespace tks;

namespace {

Tensor Param(Shape s, std::vector<float> v) { return Tensor::from(std::move(s), std::move(v), true); }

// Projection weights r and the loss sum(out * r) as a tensor.
Tensor Project(Tape& tape, const Tensor& out, const std::vector<float>& r) {
  return ops::sum(tape, ops::mul(tape, out, Tensor::from(out.shape(), r)));
}

std::vector<float> Values(const Tensor& t) { return {t.data().begin(), t.data().end()}; }

}  // namespace

TEST_SUITE("autodiff") {
  TEST_CASE("tensor construction checks sizes") {
    CHECK_THROWS_AS(Tensor::from({2, 2}, {1, 2, 3}), DimensionError);
    Tensor t = Tensor::zeros({2, 3});
    CHECK(t.numel() == 6);
    CHECK(!t.has_grad());
    Tensor copy = t;
    copy.mutable_data()[0] = 5.0f;
    CHECK(t.at(0) == 5.0f);
    Tensor c = t.clone();
    c.mutable_data()[0] = 1.0f;
    CHECK(t.at(0) == 5.0f);
  }

  TEST_CASE("matmul examples") {
    Tape tape;
    Tensor eye = Tensor::from({2, 2}, {1, 0, 0, 1});
    Tensor m = Tensor::from({2, 2}, {1, 2, 3, 4});
    CHECK(Values(ops::matmul(tape, eye, m)) == std::vector<float>{1, 2, 3, 4});
    Tensor a = Tensor::from({2, 2}, {1, 0, 0, 0});
    Tensor b = Tensor::from({2, 2}, {5, 6, 7, 8});
    CHECK(Values(ops::matmul(tape, a, b)) == std::vector<float>{5, 6, 0, 0});
    Tensor z = ops::matmul(tape, Tensor::zeros({2, 3}), Tensor::full({3, 4}, 2.5f));
    CHECK(z.shape() == Shape{2, 4});
    for (float x : z.data()) CHECK(x == 0.0f);
  }

  TEST_CASE("matmul shape mismatch names both shapes") {
    Tape tape;
    try {
      ops::matmul(tape, Tensor::zeros({2, 3}), Tensor::zeros({4, 5}));
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("[2, 3]") != std::string::npos);
      CHECK(msg.find("[4, 5]") != std::string::npos);
    }
  }

  TEST_CASE("spike forward at and below threshold") {
    Tape tape;
    const SurrogateSpec rect{SurrogateKind::kRectangular, 1.0f};
    Tensor v = Param({2}, {0.5f, 0.49f});
    Tensor s = ops::spike(tape, v, 0.5f, rect);
    CHECK(s.at(0) == 1.0f);
    CHECK(s.at(1) == 0.0f);
    tape.backward(ops::sum(tape, s));
    CHECK(v.grad()[0] == 1.0f);
    CHECK(v.grad()[1] == 1.0f);
  }

  TEST_CASE("spike backward equals the closed-form surrogate exactly") {
    std::mt19937_64 rng(3);
    for (SurrogateKind kind : {SurrogateKind::kRectangular, SurrogateKind::kTriangular,
                               SurrogateKind::kPiecewiseQuadratic}) {
      for (float width : {0.25f, 1.0f, 2.0f}) {
        const SurrogateSpec spec{kind, width};
        auto vals = oracle::RandomFloats(257, rng, -3.0f, 3.0f);
        vals[0] = 0.5f;
        vals[1] = 0.5f + width;
        vals[2] = 0.5f - width;
        auto up = oracle::RandomFloats(257, rng);
        Tensor v = Param({257}, vals);
        Tape tape;
        Tensor s = ops::spike(tape, v, 0.5f, spec);
        tape.backward(Project(tape, s, up));
        for (std::size_t i = 0; i < vals.size(); ++i) {
          const float x = vals[i] - 0.5f;
          const float ax = std::fabs(x);
          float d = 0.0f;
          if (kind == SurrogateKind::kRectangular) d = ax < width ? 1.0f / width : 0.0f;
          if (kind == SurrogateKind::kTriangular)
            d = ax < width ? (1.0f / width) * (1.0f - ax / width) : 0.0f;
          if (kind == SurrogateKind::kPiecewiseQuadratic)
            d = ax < width ? (2.0f / width) * (1.0f - ax / width) : 0.0f;
          CHECK(v.grad()[i] == up[i] * d);
          CHECK((s.at(i) == 0.0f || s.at(i) == 1.0f));
        }
      }
    }
  }

  TEST_CASE("surrogate derivative is nonnegative and vanishes outside its support") {
    for (SurrogateKind kind : {SurrogateKind::kRectangular, SurrogateKind::kTriangular,
                               SurrogateKind::kPiecewiseQuadratic}) {
      const SurrogateSpec spec{kind, 0.8f};
      for (float x = -2.0f; x <= 2.0f; x += 0.01f) {
        CHECK(spec.derivative(x) >= 0.0f);
        if (std::fabs(x) >= 0.8f) CHECK(spec.derivative(x) == 0.0f);
      }
    }
    CHECK_THROWS_AS((SurrogateSpec{SurrogateKind::kTriangular, 0.0f}.validate()), ParameterError);
    CHECK_THROWS_AS(surrogate_kind_from_string("sigmoid"), ConfigError);
  }

  TEST_CASE("softmax examples") {
    Tape tape;
    for (float tau : {0.5f, 1.0f, 7.0f}) {
      Tensor s = ops::softmax(tape, Tensor::from({2}, {0, 0}), tau);
      CHECK(s.at(0) == doctest::Approx(0.5));
      CHECK(s.at(1) == doctest::Approx(0.5));
    }
    Tensor s = ops::softmax(tape, Tensor::from({2}, {std::log(4.0f), 0}), 1.0f);
    CHECK(s.at(0) == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(s.at(1) == doctest::Approx(0.2).epsilon(1e-6));
    Tensor hot = ops::softmax(tape, Tensor::from({2}, {10, 0}), 1e6f);
    CHECK(hot.at(0) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK_THROWS_AS(ops::softmax(tape, Tensor::from({2}, {1, 2}), 0.0f), ParameterError);
    CHECK_THROWS_AS(ops::softmax(tape, Tensor::from({2}, {1, 2}), -1.0f), ParameterError);
  }

  TEST_CASE("softmax rows sum to one for large logits") {
    std::mt19937_64 rng(11);
    Tape tape;
    for (int trial = 0; trial < 50; ++trial) {
      auto logits = oracle::RandomFloats(6 * 9, rng, -1e4f, 1e4f);
      Tensor s = ops::softmax(tape, Tensor::from({6, 9}, logits), 1.0f + trial % 4);
      for (std::size_t r = 0; r < 6; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 9; ++c) sum += s.at(r * 9 + c);
        CHECK(std::abs(sum - 1.0) <= 1e-6);
      }
    }
  }

  TEST_CASE("backward examples") {
    {
      Tensor w = Param({3}, {1, -2, 3});
      Tape tape;
      tape.backward(ops::sum(tape, w));
      CHECK(Values(Tensor::from({3}, {w.grad().begin(), w.grad().end()})) ==
            std::vector<float>{1, 1, 1});
    }
    {
      Tensor w = Param({2}, {1, 2});
      Tape tape;
      tape.backward(ops::sum(tape, ops::mul(tape, w, w)));
      CHECK(w.grad()[0] == 2.0f);
      CHECK(w.grad()[1] == 4.0f);
    }
  }

  TEST_CASE("matmul chain matches double-precision finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(seed);
      const auto av = oracle::RandomFloats(3 * 4, rng);
      const auto bv = oracle::RandomFloats(4 * 5, rng);
      const auto cv = oracle::RandomFloats(5 * 2, rng);
      const auto r = oracle::RandomFloats(3 * 2, rng);
      Tensor a = Param({3, 4}, av), b = Param({4, 5}, bv), c = Param({5, 2}, cv);
      Tape tape;
      tape.backward(Project(tape, ops::matmul(tape, ops::matmul(tape, a, b), c), r));
      const oracle::Vec rd(r.begin(), r.end());
      const oracle::Vec A(av.begin(), av.end()), B(bv.begin(), bv.end()), C(cv.begin(), cv.end());
      auto loss_a = [&](const oracle::Vec& x) {
        return oracle::Dot(oracle::Matmul(oracle::Matmul(x, B, 3, 4, 5), C, 3, 5, 2), rd);
      };
      auto loss_b = [&](const oracle::Vec& x) {
        return oracle::Dot(oracle::Matmul(oracle::Matmul(A, x, 3, 4, 5), C, 3, 5, 2), rd);
      };
      auto loss_c = [&](const oracle::Vec& x) {
        return oracle::Dot(oracle::Matmul(oracle::Matmul(A, B, 3, 4, 5), x, 3, 5, 2), rd);
      };
      CHECK(oracle::MaxRelError(a.grad(), oracle::FiniteDifference(loss_a, A)) < 1e-3);
      CHECK(oracle::MaxRelError(b.grad(), oracle::FiniteDifference(loss_b, B)) < 1e-3);
      CHECK(oracle::MaxRelError(c.grad(), oracle::FiniteDifference(loss_c, C)) < 1e-3);
    }
  }

  TEST_CASE("elementwise, log, mean and softmax gradients match finite differences") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(100 + seed);
      const std::size_t n = 12;
      const auto xv = oracle::RandomFloats(n, rng, 0.2f, 2.0f);
      const auto yv = oracle::RandomFloats(n, rng, -1.0f, 1.0f);
      const auto r = oracle::RandomFloats(n, rng);
      const oracle::Vec X(xv.begin(), xv.end()), Y(yv.begin(), yv.end()), R(r.begin(), r.end());
      const float tau = 0.5f + static_cast<float>(seed) * 0.5f;

      Tensor x = Param({3, 4}, xv), y = Param({3, 4}, yv);
      Tape tape;
      // add, mul, log and softmax in one graph; mean closes it.
      Tensor h = ops::add(tape, ops::mul(tape, ops::log(tape, x), y), x);
      Tensor p = ops::softmax(tape, h, tau);
      Tensor loss = ops::mean(tape, ops::mul(tape, p, Tensor::from({3, 4}, r)));
      tape.backward(loss);

      auto f = [&](const oracle::Vec& xs, const oracle::Vec& ys) {
        oracle::Vec hv(n);
        for (std::size_t i = 0; i < n; ++i) hv[i] = std::log(xs[i]) * ys[i] + xs[i];
        return oracle::Dot(oracle::Softmax(hv, 4, tau), R) / static_cast<double>(n);
      };
      const auto gx = oracle::FiniteDifference([&](const oracle::Vec& v) { return f(v, Y); }, X);
      const auto gy = oracle::FiniteDifference([&](const oracle::Vec& v) { return f(X, v); }, Y);
      CHECK(oracle::MaxRelError(x.grad(), gx) < 1e-3);
      CHECK(oracle::MaxRelError(y.grad(), gy) < 1e-3);
    }
  }

  TEST_CASE("a tensor used twice accumulates both contributions") {
    Tensor w = Param({2}, {3, -1});
    Tape tape;
    Tensor y = ops::add(tape, ops::scale(tape, w, 2.0f), ops::mul(tape, w, w));
    tape.backward(ops::sum(tape, y));
    CHECK(w.grad()[0] == 2.0f + 6.0f);
    CHECK(w.grad()[1] == 2.0f - 2.0f);
  }

  TEST_CASE("backward preconditions") {
    Tensor w = Param({2}, {1, 2});
    {
      Tape tape;
      Tensor y = ops::mul(tape, w, w);
      CHECK_THROWS_AS(tape.backward(y), ContractError);
    }
    {
      Tape tape;
      Tensor loss = ops::sum(tape, w);
      tape.backward(loss);
      CHECK_THROWS_AS(tape.backward(loss), TapeError);
      tape.reset();
      Tensor again = ops::sum(tape, w);
      CHECK_NOTHROW(tape.backward(again));
    }
    {
      Tape tape;
      Tensor constant = Tensor::scalar(1.0f);
      CHECK_THROWS_AS(tape.backward(constant), TapeError);
      Tape other;
      Tensor foreign = ops::sum(other, w);
      CHECK_THROWS_AS(tape.backward(foreign), TapeError);
    }
  }

  TEST_CASE("inference tape records nothing") {
    Tensor w = Param({2}, {1, 2});
    Tape tape = Tape::inference();
    Tensor y = ops::sum(tape, ops::mul(tape, w, w));
    CHECK(tape.size() == 0);
    CHECK(y.item() == 5.0f);
    CHECK(!y.tracks_grad());
  }

  TEST_CASE("detach cuts gradient flow") {
    Tensor w = Param({2}, {1, 2});
    Tape tape;
    Tensor d = ops::mul(tape, w, w).detach();
    Tensor loss = ops::sum(tape, ops::add(tape, d, w));
    tape.backward(loss);
    CHECK(w.grad()[0] == 1.0f);
    CHECK(w.grad()[1] == 1.0f);
  }

  TEST_CASE("log clamps at the floor and stops the gradient there") {
    Tensor x = Param({2}, {0.0f, 1.0f});
    Tape tape;
    Tensor y = ops::log(tape, x);
    CHECK(y.at(0) == doctest::Approx(std::log(1e-12)).epsilon(1e-6));
    tape.backward(ops::sum(tape, y));
    CHECK(x.grad()[0] == 0.0f);
    CHECK(x.grad()[1] == 1.0f);
  }

  TEST_CASE("conv2d matches a direct convolution") {
    std::mt19937_64 rng(5);
    const auto xv = oracle::RandomFloats(2 * 3 * 5 * 4, rng);
    const auto wv = oracle::RandomFloats(2 * 3 * 3 * 3, rng);
    const auto bv = oracle::RandomFloats(2, rng);
    Tape tape = Tape::inference();
    for (std::size_t stride : {1, 2}) {
      const std::size_t pad = 1;
      Tensor y = ops::conv2d(tape, Tensor::from({2, 3, 5, 4}, xv), Tensor::from({2, 3, 3, 3}, wv),
                             Tensor::from({2}, bv), stride, pad);
      const std::size_t ho = (5 + 2 * pad - 3) / stride + 1, wo = (4 + 2 * pad - 3) / stride + 1;
      REQUIRE(y.shape() == Shape{2, 2, ho, wo});
      for (std::size_t n = 0; n < 2; ++n)
        for (std::size_t o = 0; o < 2; ++o)
          for (std::size_t i = 0; i < ho; ++i)
            for (std::size_t j = 0; j < wo; ++j) {
              double acc = bv[o];
              for (std::size_t c = 0; c < 3; ++c)
                for (std::size_t ki = 0; ki < 3; ++ki)
                  for (std::size_t kj = 0; kj < 3; ++kj) {
                    const long r = static_cast<long>(i * stride + ki) - static_cast<long>(pad);
                    const long q = static_cast<long>(j * stride + kj) - static_cast<long>(pad);
                    if (r < 0 || q < 0 || r >= 5 || q >= 4) continue;
                    acc += xv[((n * 3 + c) * 5 + r) * 4 + q] * wv[((o * 3 + c) * 3 + ki) * 3 + kj];
                  }
              CHECK(y.at(((n * 2 + o) * ho + i) * wo + j) == doctest::Approx(acc).epsilon(1e-5));
            }
    }
  }
}
