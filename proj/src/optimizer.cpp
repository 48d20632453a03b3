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

#include "t2v/optimizer.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "t2v/evaluation.hpp"

namespace t2v {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (batch_size == 0) fail("batch size must be positive");
  if (!(eta0 > 0.0)) fail("initial learning rate must be positive");
  if (!(mu0 >= 0.0 && mu0 < 1.0)) fail("momentum must lie in [0, 1)");
  if (!(lambda >= 0.0)) fail("L2 weight must be non-negative");
  if (!(init_sigma > 0.0)) fail("initialization sigma must be positive");
  if (!(halving_threshold >= 0.0)) fail("halving threshold must be non-negative");
  if (patience == 0) fail("patience must be positive");
  if (max_epochs == 0) fail("max epochs must be positive");
}

OptimizerState OptimizerState::initial(const ModelParams& params, const TrainConfig& config) {
  OptimizerState s;
  s.velocity = ModelParams::zeros(params.dims());
  s.learning_rate = config.eta0;
  s.momentum = config.mu0;
  return s;
}

void nesterov_update(std::span<double> theta, std::span<double> velocity,
                     std::span<const double> grad, double learning_rate, double momentum) {
  if (theta.size() != velocity.size() || theta.size() != grad.size()) {
    throw ShapeError("nesterov: parameter, velocity and gradient sizes differ (" +
                     std::to_string(theta.size()) + ", " + std::to_string(velocity.size()) +
                     ", " + std::to_string(grad.size()) + ")");
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    velocity[i] = momentum * velocity[i] - learning_rate * grad[i];
    theta[i] += velocity[i];
  }
}

ModelParams lookahead(const ModelParams& params, const OptimizerState& state) {
  ModelParams ahead = params;
  auto dst = ahead.tensors();
  auto vel = state.velocity.tensors();
  for (std::size_t k = 0; k < dst.size(); ++k) axpy(state.momentum, *vel[k], *dst[k]);
  return ahead;
}

void nesterov_step(ModelParams& params, const ModelParams& grads_at_lookahead,
                   OptimizerState& state) {
  auto theta = params.tensors();
  auto vel = state.velocity.tensors();
  auto grad = grads_at_lookahead.tensors();
  for (std::size_t k = 0; k < theta.size(); ++k) {
    if (!theta[k]->same_shape(*grad[k]) || !theta[k]->same_shape(*vel[k])) {
      throw ShapeError("nesterov: tensor " + ModelParams::tensor_names()[k] + " is " +
                       theta[k]->shape_string() + " but its gradient is " +
                       grad[k]->shape_string());
    }
    nesterov_update(theta[k]->data(), vel[k]->data(), grad[k]->data(), state.learning_rate,
                    state.momentum);
  }
}

void lr_schedule(OptimizerState& state, double val_p1_percent, double threshold) {
  if (state.prev_val_p1.has_value() && val_p1_percent - *state.prev_val_p1 < threshold) {
    state.learning_rate /= 2.0;
    ++state.halvings;
  }
  state.prev_val_p1 = val_p1_percent;
}

void write_epoch_record(std::ostream& out, const EpochRecord& r) {
  std::ostringstream line;
  line << std::setprecision(17) << "epoch=" << r.epoch << " train_loss=" << r.train_loss
       << " val_p1=" << r.val_p1 << " lr=" << r.learning_rate
       << " improved=" << (r.improved ? 1 : 0) << '\n';
  out << line.str();
}

std::uint64_t shuffle_seed(std::uint64_t seed) { return seed ^ 0x9E3779B97F4A7C15ULL; }

TrainResult train(ModelParams params, const SymbolTable& symbols,
                  std::span<const LabeledExample> train_split,
                  std::span<const LabeledExample> validation_split, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_split.empty()) throw ConfigError("training split is empty");
  if (validation_split.empty()) throw ConfigError("validation split is empty");
  if (symbols.size() != params.encoder.symbols()) {
    throw ConfigError("symbol table size " + std::to_string(symbols.size()) +
                      " does not match embedding rows " +
                      std::to_string(params.encoder.symbols()));
  }

  const std::size_t labels = params.softmax.labels();
  OptimizerState state = OptimizerState::initial(params, config);
  SeededRng shuffler(shuffle_seed(config.seed));
  TrainResult result;
  result.best = params;
  double best = -1.0;
  std::size_t stale_epochs = 0;
  ModelParams grads;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    state.epoch = epoch;
    const double epoch_rate = state.learning_rate;
    const auto batches =
        make_batches(train_split, symbols, labels, config.batch_size, &shuffler);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const Batch& batch = batches[b];
      const ModelParams ahead = lookahead(params, state);
      BatchLoss bl;
      try {
        bl = compute_gradients(ahead, batch.inputs, batch.targets, config.lambda,
                               config.regularize_biases, grads);
      } catch (const NumericError& e) {
        throw DivergenceError("training diverged in epoch " + std::to_string(epoch) +
                              " batch " + std::to_string(b) + " at learning rate " +
                              std::to_string(state.learning_rate) + ": " + e.what());
      }
      const double value = bl.value.total();
      if (!std::isfinite(value)) {
        throw DivergenceError("training diverged in epoch " + std::to_string(epoch) +
                              " batch " + std::to_string(b) + " at learning rate " +
                              std::to_string(state.learning_rate) + ": loss is not finite");
      }
      loss_sum += value * static_cast<double>(batch.example_ids.size());
      nesterov_step(params, grads, state);
    }

    const EvalReport report = evaluate(params, symbols, validation_split, config.batch_size);
    const double p1 = report.precision_at_1;
    lr_schedule(state, 100.0 * p1, config.halving_threshold);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_split.size());
    rec.val_p1 = p1;
    rec.learning_rate = epoch_rate;
    rec.improved = p1 > best;
    if (rec.improved) {
      best = p1;
      state.best_val_p1 = 100.0 * p1;
      result.best = params;
      result.best_epoch = epoch;
      result.best_val_p1 = p1;
      stale_epochs = 0;
    } else {
      ++stale_epochs;
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec, params);
    if (stale_epochs >= config.patience) break;
  }
  result.last = std::move(params);
  return result;
}

}  // namespace t2v
