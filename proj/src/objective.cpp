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

#include "t2v/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace t2v {

SoftmaxParams SoftmaxParams::zeros(std::size_t labels, std::size_t embedding_dim) {
  return {Matrix(labels, embedding_dim), Matrix(labels, 1)};
}

void SoftmaxParams::validate() const {
  if (labels() < 2) throw ShapeError("softmax layer needs at least two labels");
  if (b_out.rows() != labels() || b_out.cols() != 1) {
    throw ShapeError("softmax bias " + b_out.shape_string() + " does not match weights " +
                     w_out.shape_string());
  }
}

Matrix softmax_rows(const Matrix& logits) {
  if (!logits.all_finite()) throw NumericError("softmax: non-finite logits");
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto out = p.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double total = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      out[j] = std::exp(in[j] - peak);
      total += out[j];
    }
    for (double& v : out) v /= total;
  }
  return p;
}

Matrix output_logits(const SoftmaxParams& sp, const Matrix& embeddings) {
  if (embeddings.cols() != sp.w_out.cols()) {
    throw ShapeError("embeddings " + embeddings.shape_string() +
                     " do not match softmax weights " + sp.w_out.shape_string());
  }
  Matrix logits(embeddings.rows(), sp.labels());
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    auto row = logits.row(i);
    std::copy(sp.b_out.data().begin(), sp.b_out.data().end(), row.begin());
    gemv_accumulate(sp.w_out, embeddings.row(i), row);
  }
  return logits;
}

Matrix posteriors(const SoftmaxParams& sp, const Matrix& embeddings) {
  return softmax_rows(output_logits(sp, embeddings));
}

void validate_targets(const Matrix& targets) {
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    double positives = 0.0;
    for (double v : targets.row(i)) {
      if (v != 0.0 && v != 1.0) throw std::invalid_argument("targets must be 0 or 1");
      positives += v;
    }
    if (positives < 1.0) {
      throw std::invalid_argument("target row " + std::to_string(i) + " has no gold label");
    }
  }
}

LossValue loss(const Matrix& probabilities, const Matrix& targets,
               std::span<const Matrix* const> theta, double lambda) {
  if (!probabilities.same_shape(targets)) {
    throw ShapeError("loss: probabilities " + probabilities.shape_string() + " vs targets " +
                     targets.shape_string());
  }
  LossValue v;
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.rows(); ++i) {
    for (std::size_t j = 0; j < targets.cols(); ++j) {
      const double t = targets(i, j);
      if (t == 0.0) continue;
      double p = probabilities(i, j);
      if (p < kProbabilityFloor) {
        p = kProbabilityFloor;
        ++v.saturated;
      }
      sum -= t * std::log(p);
    }
  }
  v.data_term = sum / static_cast<double>(targets.rows());
  double norm = 0.0;
  for (const Matrix* m : theta) norm += sum_of_squares(*m);
  v.regularization_term = lambda * norm;
  return v;
}

OutputGradients loss_grad(const SoftmaxParams& sp, const Matrix& embeddings,
                          const Matrix& probabilities, const Matrix& targets) {
  if (!probabilities.same_shape(targets) || probabilities.rows() != embeddings.rows() ||
      probabilities.cols() != sp.labels()) {
    throw ShapeError("loss_grad: inconsistent shapes, probabilities " +
                     probabilities.shape_string() + ", targets " + targets.shape_string() +
                     ", embeddings " + embeddings.shape_string());
  }
  const std::size_t batch = targets.rows();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  OutputGradients g{Matrix(batch, sp.labels()), Matrix(sp.labels(), sp.w_out.cols()),
                    Matrix(sp.labels(), 1), Matrix(batch, embeddings.cols())};
  for (std::size_t i = 0; i < batch; ++i) {
    double gold = 0.0;
    for (double t : targets.row(i)) gold += t;
    auto dl = g.d_logits.row(i);
    for (std::size_t j = 0; j < dl.size(); ++j) {
      dl[j] = inv_batch * (gold * probabilities(i, j) - targets(i, j));
    }
    outer_accumulate(dl, embeddings.row(i), g.d_w_out);
    for (std::size_t j = 0; j < dl.size(); ++j) g.d_b_out[j] += dl[j];
    gemv_transpose_accumulate(sp.w_out, dl, g.d_embeddings.row(i));
  }
  return g;
}

void add_l2_gradient(std::span<const Matrix* const> theta, double lambda,
                     std::span<Matrix* const> grads) {
  if (theta.size() != grads.size()) {
    throw ShapeError("add_l2_gradient: " + std::to_string(theta.size()) + " parameters vs " +
                     std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t k = 0; k < theta.size(); ++k) axpy(2.0 * lambda, *theta[k], *grads[k]);
}

}  // namespace t2v
