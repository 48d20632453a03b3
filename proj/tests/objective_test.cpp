/* Copyright 2026 The t2v Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <cmath>

#include "doctest.h"
#include "support/oracles.hpp"
#include "t2v/objective.hpp"

namespace t2v {
namespace {

TEST_CASE("posteriors: zero layer is uniform") {
  const SoftmaxParams sp = SoftmaxParams::zeros(4, 3);
  const Matrix p = posteriors(sp, Matrix::from_rows({{1, 2, 3}, {-1, 0, 5}}));
  for (double v : p.data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("softmax closed form and shift invariance") {
  const Matrix p = softmax_rows(Matrix::from_rows({{1, 2, 3}}));
  // e^x / sum e^x for x = (1, 2, 3)
  CHECK(std::fabs(p(0, 0) - 0.09003057317038046) < 1e-12);
  CHECK(std::fabs(p(0, 1) - 0.24472847105479767) < 1e-12);
  CHECK(std::fabs(p(0, 2) - 0.6652409557748219) < 1e-12);

  SeededRng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix logits(1, 6);
    for (double& v : logits.data()) v = 5.0 * rng.normal();
    Matrix shifted = logits;
    const double c = 100.0 * rng.normal();
    for (double& v : shifted.data()) v += c;
    const Matrix a = softmax_rows(logits), b = softmax_rows(shifted);
    double total = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      CHECK(std::fabs(a(0, j) - b(0, j)) < 1e-12);
      CHECK((a(0, j) > 0.0 && a(0, j) < 1.0));
      total += a(0, j);
    }
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("softmax rejects non-finite logits") {
  Matrix logits = Matrix::from_rows({{1, NAN, 0}});
  CHECK_THROWS_AS(softmax_rows(logits), NumericError);
  logits(0, 1) = INFINITY;
  CHECK_THROWS_AS(softmax_rows(logits), NumericError);
}

TEST_CASE("loss special cases") {
  const std::vector<const Matrix*> none;
  const Matrix t = Matrix::from_rows({{0, 1, 0}});
  CHECK(loss(Matrix::from_rows({{0, 1, 0}}), t, none, 0.0).total() == 0.0);

  const std::size_t L = 7;
  Matrix uniform(3, L, 1.0 / L);
  Matrix gold(3, L);
  gold(0, 2) = gold(1, 0) = gold(2, 6) = 1.0;
  CHECK(loss(uniform, gold, none, 0.0).total() == doctest::Approx(std::log(7.0)).epsilon(1e-14));
}

TEST_CASE("loss matches direct summation") {
  const Matrix p = Matrix::from_rows({{0.2, 0.5, 0.3}, {0.6, 0.1, 0.3}});
  const Matrix t = Matrix::from_rows({{0, 1, 1}, {1, 0, 0}});
  const Matrix theta_a = Matrix::from_rows({{0.5, -1.0}, {2.0, 0.25}});
  const Matrix theta_b = Matrix::from_rows({{3.0}});
  const std::vector<const Matrix*> theta{&theta_a, &theta_b};
  const double lambda = 0.001;
  // (1/2) * (-(log .5 + log .3) - log .6) + 0.001 * (0.25 + 1 + 4 + 0.0625 + 9)
  const double expected =
      0.5 * (-(std::log(0.5) + std::log(0.3)) - std::log(0.6)) + lambda * 14.3125;
  const LossValue v = loss(p, t, theta, lambda);
  CHECK(std::fabs(v.total() - expected) < 1e-12);
  CHECK(v.regularization_term == doctest::Approx(lambda * 14.3125));
  CHECK(v.total() >= v.regularization_term);
}

TEST_CASE("loss clamps zero gold probabilities and counts them") {
  const std::vector<const Matrix*> none;
  const LossValue v =
      loss(Matrix::from_rows({{1.0, 0.0}}), Matrix::from_rows({{0, 1}}), none, 0.0);
  CHECK(v.saturated == 1);
  CHECK(v.total() == doctest::Approx(-std::log(kProbabilityFloor)));
  CHECK(std::isfinite(v.total()));
}

TEST_CASE("targets validation") {
  CHECK_NOTHROW(validate_targets(Matrix::from_rows({{0, 1}, {1, 1}})));
  CHECK_THROWS(validate_targets(Matrix::from_rows({{0, 0}})));
  CHECK_THROWS(validate_targets(Matrix::from_rows({{0, 0.5}})));
}

TEST_CASE("loss_grad: single-label rows give (p - t) / B") {
  SeededRng rng(17);
  SoftmaxParams sp = SoftmaxParams::zeros(4, 3);
  for (double& v : sp.w_out.data()) v = rng.normal();
  Matrix e(2, 3);
  for (double& v : e.data()) v = rng.normal();
  const Matrix p = posteriors(sp, e);
  Matrix t(2, 4);
  t(0, 1) = t(1, 3) = 1.0;
  const OutputGradients g = loss_grad(sp, e, p, t);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::fabs(g.d_logits(i, j) - 0.5 * (p(i, j) - t(i, j))) < 1e-15);
}

TEST_CASE("l2 gradient alone is 2 lambda theta") {
  Matrix a = Matrix::from_rows({{1.0, -2.0}});
  Matrix ga(1, 2);
  const std::vector<const Matrix*> theta{&a};
  const std::vector<Matrix*> grads{&ga};
  add_l2_gradient(theta, 0.001, grads);
  CHECK(ga(0, 0) == doctest::Approx(0.002));
  CHECK(ga(0, 1) == doctest::Approx(-0.004));
}

TEST_CASE("loss_grad on a multi-label row matches finite differences") {
  SeededRng rng(23);
  SoftmaxParams sp = SoftmaxParams::zeros(5, 3);
  for (double& v : sp.w_out.data()) v = rng.normal();
  for (double& v : sp.b_out.data()) v = rng.normal();
  Matrix e(2, 3);
  for (double& v : e.data()) v = rng.normal();
  Matrix t(2, 5);
  t(0, 1) = t(0, 4) = 1.0;  // two gold tags
  t(1, 2) = 1.0;

  auto value = [&](const SoftmaxParams& s, const Matrix& emb) {
    const std::vector<const Matrix*> none;
    return loss(posteriors(s, emb), t, none, 0.0).total();
  };
  const OutputGradients g = loss_grad(sp, e, posteriors(sp, e), t);
  const double eps = 1e-5;
  auto check = [&](Matrix& target, const Matrix& analytic, auto eval) {
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double saved = target[i];
      target[i] = saved + eps;
      const double up = eval();
      target[i] = saved - eps;
      const double down = eval();
      target[i] = saved;
      const double numeric = (up - down) / (2 * eps);
      const double err = std::fabs(numeric - analytic[i]);
      CHECK((err < 1e-8 || err / std::max(std::fabs(numeric), std::fabs(analytic[i])) < 1e-6));
    }
  };
  check(sp.w_out, g.d_w_out, [&] { return value(sp, e); });
  check(sp.b_out, g.d_b_out, [&] { return value(sp, e); });
  check(e, g.d_embeddings, [&] { return value(sp, e); });
}

}  // namespace
}  // namespace t2v
