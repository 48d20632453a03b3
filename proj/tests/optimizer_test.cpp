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
#include <sstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "t2v/optimizer.hpp"

namespace t2v {
namespace {

TEST_CASE("nesterov: zero gradient and zero velocity is a fixed point") {
  std::vector<double> theta{1.5, -2.0}, v{0.0, 0.0};
  const std::vector<double> g{0.0, 0.0};
  nesterov_update(theta, v, g, 0.01, 0.9);
  CHECK(theta == std::vector<double>{1.5, -2.0});
}

TEST_CASE("nesterov: zero momentum is plain SGD") {
  std::vector<double> theta{1.0, 2.0}, v{0.0, 0.0};
  const std::vector<double> g{0.5, -1.0};
  nesterov_update(theta, v, g, 0.1, 0.0);
  CHECK(theta[0] == doctest::Approx(0.95));
  CHECK(theta[1] == doctest::Approx(2.1));
}

TEST_CASE("nesterov on J = theta^2 follows the hand-iterated recurrence") {
  std::vector<double> theta{1.0}, v{0.0};
  const double lr = 0.1, mu = 0.9;
  // step 1: g(1.0) = 2.0, v = -0.2, theta = 0.8
  // step 2: g(0.8 - 0.18) = 1.24, v = -0.18 - 0.124 = -0.304, theta = 0.496
  const double expected_theta[] = {0.8, 0.496};
  const double expected_v[] = {-0.2, -0.304};
  for (int step = 0; step < 2; ++step) {
    const std::vector<double> g{2.0 * (theta[0] + mu * v[0])};
    nesterov_update(theta, v, g, lr, mu);
    CHECK(std::fabs(theta[0] - expected_theta[step]) < 1e-15);
    CHECK(std::fabs(v[0] - expected_v[step]) < 1e-15);
  }
}

TEST_CASE("nesterov: one step on a convex quadratic decreases it") {
  SeededRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // J = sum a_i x_i^2 with curvature 2 a_i <= 2; lr below 1 / max curvature.
    std::vector<double> a(4), x(4), v(4);
    for (std::size_t i = 0; i < 4; ++i) {
      a[i] = 0.1 + rng.uniform();
      x[i] = rng.normal();
      v[i] = 0.0;
    }
    auto J = [&](const std::vector<double>& p) {
      double s = 0;
      for (std::size_t i = 0; i < 4; ++i) s += a[i] * p[i] * p[i];
      return s;
    };
    const double before = J(x);
    std::vector<double> g(4);
    for (std::size_t i = 0; i < 4; ++i) g[i] = 2.0 * a[i] * x[i];
    nesterov_update(x, v, g, 0.2, 0.9);
    CHECK(J(x) < before);
  }
}

TEST_CASE("nesterov_step validates shapes and uses lookahead") {
  const ModelDims dims{6, 2, 3, 3, 2};
  ModelParams params = ModelParams::zeros(dims);
  TrainConfig cfg;
  OptimizerState state = OptimizerState::initial(params, cfg);
  for (double& x : state.velocity.encoder.embedding.data()) x = 1.0;
  const ModelParams ahead = lookahead(params, state);
  CHECK(ahead.encoder.embedding(0, 0) == doctest::Approx(0.9));

  ModelParams wrong = ModelParams::zeros({7, 2, 3, 3, 2});
  CHECK_THROWS_AS(nesterov_step(params, wrong, state), ShapeError);
}

TEST_CASE("a dense step updates exactly count_params scalars") {
  const ModelDims dims{8, 3, 4, 4, 5};
  ModelParams params = ModelParams::zeros(dims);
  ModelParams grads = ModelParams::zeros(dims);
  for (Matrix* m : grads.tensors()) m->fill(1.0);
  TrainConfig cfg;
  OptimizerState state = OptimizerState::initial(params, cfg);
  nesterov_step(params, grads, state);
  std::size_t changed = 0;
  for (const Matrix* m : params.tensors())
    for (double v : m->data()) changed += (v != 0.0);
  CHECK(changed == params.scalar_count());
}

TEST_CASE("lr_schedule") {
  const ModelParams p = ModelParams::zeros({4, 2, 2, 2, 2});
  TrainConfig cfg;
  OptimizerState s = OptimizerState::initial(p, cfg);
  lr_schedule(s, 10.0, cfg.halving_threshold);
  CHECK(s.learning_rate == cfg.eta0);
  lr_schedule(s, 10.5, cfg.halving_threshold);
  CHECK(s.learning_rate == cfg.eta0);
  lr_schedule(s, 10.505, cfg.halving_threshold);
  CHECK(s.learning_rate == cfg.eta0 / 2);
  lr_schedule(s, 10.0, cfg.halving_threshold);
  CHECK(s.learning_rate == cfg.eta0 / 4);
  CHECK(s.halvings == 2);
}

TEST_CASE("lr is non-increasing and halves once per sub-threshold epoch") {
  SeededRng rng(9);
  const ModelParams p = ModelParams::zeros({4, 2, 2, 2, 2});
  TrainConfig cfg;
  OptimizerState s = OptimizerState::initial(p, cfg);
  double previous = s.learning_rate;
  double prev_p1 = 0;
  std::size_t expected_halvings = 0;
  for (int epoch = 0; epoch < 40; ++epoch) {
    const double p1 = 100.0 * rng.uniform();
    if (epoch > 0 && p1 - prev_p1 < cfg.halving_threshold) ++expected_halvings;
    lr_schedule(s, p1, cfg.halving_threshold);
    CHECK(s.learning_rate <= previous);
    previous = s.learning_rate;
    prev_p1 = p1;
  }
  CHECK(s.halvings == expected_halvings);
  CHECK(s.learning_rate == doctest::Approx(cfg.eta0 / std::pow(2.0, expected_halvings)));
}

TEST_CASE("default configuration") {
  const TrainConfig cfg;
  CHECK(cfg.batch_size == 64);
  CHECK(cfg.eta0 == 0.01);
  CHECK(cfg.mu0 == 0.9);
  CHECK(cfg.lambda == 0.001);
  CHECK(cfg.init_sigma == 0.1);
  CHECK(cfg.halving_threshold == 0.01);
  CHECK(cfg.patience == 5);
  CHECK(cfg.max_epochs == 30);
  TrainConfig bad = cfg;
  bad.mu0 = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

std::vector<LabeledExample> tiny_corpus() {
  // Label k is marked by a distinctive character.
  const char* marks[] = {"q", "x", "z", "j", "v"};
  std::vector<LabeledExample> out;
  for (std::uint32_t k = 0; k < 5; ++k)
    for (int i = 0; i < 4; ++i) {
      std::string t = std::string("ab") + marks[k] + std::string(static_cast<std::size_t>(i), 'c');
      out.push_back({t, {k}});
    }
  return out;
}

TEST_CASE("train is deterministic and logs one record per epoch") {
  const auto data = tiny_corpus();
  const SymbolTable table(build_alphabet(data));
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.max_epochs = 4;
  cfg.seed = 21;
  auto run = [&] {
    SeededRng rng(cfg.seed);
    ModelParams init = ModelParams::initialize({table.size(), 5, 6, 6, 5}, cfg.init_sigma, rng);
    return train(init, table, data, data, cfg);
  };
  const TrainResult a = run();
  const TrainResult b = run();
  CHECK(a.best == b.best);
  CHECK(a.last == b.last);
  CHECK(a.log == b.log);
  CHECK(a.log.size() <= 4);
  CHECK(a.log.front().epoch == 1);
  CHECK(a.log.front().learning_rate == cfg.eta0);

  std::ostringstream os;
  write_epoch_record(os, a.log.front());
  CHECK(os.str().starts_with("epoch=1 train_loss="));
}

TEST_CASE("train stops after patience epochs without improvement") {
  const auto data = tiny_corpus();
  const SymbolTable table(build_alphabet(data));
  TrainConfig cfg;
  cfg.batch_size = 20;
  cfg.eta0 = 1e-12;  // parameters barely move: validation P@1 is flat
  cfg.patience = 3;
  cfg.max_epochs = 50;
  SeededRng rng(2);
  ModelParams init = ModelParams::initialize({table.size(), 3, 3, 3, 5}, 0.1, rng);
  const TrainResult r = train(init, table, data, data, cfg);
  CHECK(r.log.size() == 4);
  CHECK(r.best_epoch == 1);
}

TEST_CASE("train reports divergence with batch index and rate") {
  const auto data = tiny_corpus();
  const SymbolTable table(build_alphabet(data));
  TrainConfig cfg;
  cfg.batch_size = 5;
  cfg.eta0 = 1e200;
  cfg.mu0 = 0.0;
  SeededRng rng(2);
  ModelParams init = ModelParams::initialize({table.size(), 3, 3, 3, 5}, 0.1, rng);
  try {
    train(init, table, data, data, cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("batch") != std::string::npos);
    CHECK(msg.find("learning rate") != std::string::npos);
  }
}

}  // namespace
}  // namespace t2v
