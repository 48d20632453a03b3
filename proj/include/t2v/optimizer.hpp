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

#ifndef T2V_OPTIMIZER_HPP_
#define T2V_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "t2v/data.hpp"
#include "t2v/model.hpp"

namespace t2v {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  std::size_t batch_size = 64;
  double eta0 = 0.01;
  double mu0 = 0.9;
  double lambda = 0.001;
  double init_sigma = 0.1;
  double halving_threshold = 0.01;  // percentage points of validation P@1
  std::size_t patience = 5;
  std::size_t max_epochs = 30;
  std::uint64_t seed = 1;
  bool regularize_biases = true;

  void validate() const;
};

struct OptimizerState {
  ModelParams velocity;
  double learning_rate = 0.0;
  double momentum = 0.0;
  std::size_t epoch = 0;
  std::size_t halvings = 0;
  double best_val_p1 = 0.0;           // percent
  std::optional<double> prev_val_p1;  // percent; unset before the first epoch

  static OptimizerState initial(const ModelParams& params, const TrainConfig& config);
};

// Nesterov update on flat buffers, with `grad` taken at theta + mu * v:
//   v <- mu * v - lr * grad;  theta <- theta + v.
void nesterov_update(std::span<double> theta, std::span<double> velocity,
                     std::span<const double> grad, double learning_rate, double momentum);

// The point at which the next gradient must be evaluated: theta + mu * v.
ModelParams lookahead(const ModelParams& params, const OptimizerState& state);

void nesterov_step(ModelParams& params, const ModelParams& grads_at_lookahead,
                   OptimizerState& state);

// Halves the learning rate when validation P@1 (in percent) improved by less
// than `threshold` points since the previous call. The first call only
// records the baseline.
void lr_schedule(OptimizerState& state, double val_p1_percent, double threshold);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;      // mean regularized objective over the epoch
  double val_p1 = 0.0;          // fraction
  double learning_rate = 0.0;   // rate used during the epoch
  bool improved = false;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// "epoch=3 train_loss=... val_p1=... lr=... improved=1"
void write_epoch_record(std::ostream& out, const EpochRecord& record);

struct TrainResult {
  ModelParams best;
  ModelParams last;
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_val_p1 = 0.0;  // fraction
};

using EpochCallback =
    std::function<void(const EpochRecord& record, const ModelParams& current)>;

// Shuffled mini-batch training with early stopping on validation P@1.
// Throws DivergenceError when the objective stops being finite.
TrainResult train(ModelParams params, const SymbolTable& symbols,
                  std::span<const LabeledExample> train_split,
                  std::span<const LabeledExample> validation_split, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// Seed of the shuffling stream derived from the run seed.
std::uint64_t shuffle_seed(std::uint64_t seed);

}  // namespace t2v

#endif  // T2V_OPTIMIZER_HPP_
