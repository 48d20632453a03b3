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

#ifndef T2V_OBJECTIVE_HPP_
#define T2V_OBJECTIVE_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>

#include "t2v/tensor.hpp"

namespace t2v {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output layer over L hashtags: w_out is L x d_t, b_out is L x 1.
struct SoftmaxParams {
  Matrix w_out;
  Matrix b_out;

  static SoftmaxParams zeros(std::size_t labels, std::size_t embedding_dim);
  std::size_t labels() const { return w_out.rows(); }
  void validate() const;
};

// Log of the smallest probability the loss will take; protects against log(0).
inline constexpr double kProbabilityFloor = 1e-30;

// Per-row softmax with max subtraction. Throws NumericError on non-finite input.
Matrix softmax_rows(const Matrix& logits);
Matrix output_logits(const SoftmaxParams& sp, const Matrix& embeddings);
Matrix posteriors(const SoftmaxParams& sp, const Matrix& embeddings);

// Binary entries, at least one positive per row.
void validate_targets(const Matrix& targets);

struct LossValue {
  double data_term = 0.0;           // mean cross-entropy over the batch
  double regularization_term = 0.0; // lambda * ||theta||^2
  std::size_t saturated = 0;        // gold positions whose probability hit the floor

  double total() const { return data_term + regularization_term; }
};

LossValue loss(const Matrix& probabilities, const Matrix& targets,
               std::span<const Matrix* const> theta, double lambda);

struct OutputGradients {
  Matrix d_logits;      // B x L
  Matrix d_w_out;       // L x d_t
  Matrix d_b_out;       // L x 1
  Matrix d_embeddings;  // B x d_t
};

// Gradient of the data term only, i.e. without the L2 penalty.
OutputGradients loss_grad(const SoftmaxParams& sp, const Matrix& embeddings,
                          const Matrix& probabilities, const Matrix& targets);

// grads[k] += 2 * lambda * theta[k] for every tensor.
void add_l2_gradient(std::span<const Matrix* const> theta, double lambda,
                     std::span<Matrix* const> grads);

}  // namespace t2v

#endif  // T2V_OBJECTIVE_HPP_
