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

#ifndef T2V_MODEL_HPP_
#define T2V_MODEL_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "t2v/layers.hpp"
#include "t2v/objective.hpp"
#include "t2v/tensor.hpp"
#include "t2v/vocab.hpp"

namespace t2v {

struct ModelDims {
  std::size_t symbols = 0;    // embedding rows, reserved PAD/UNK included
  std::size_t input_dim = 0;  // d_c
  std::size_t hidden_dim = 0; // d_h
  std::size_t output_dim = 0; // d_t
  std::size_t labels = 0;     // L

  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

// All learnable tensors. Iteration order of tensors() is the checkpoint order:
//   embedding,
//   forward  W_r W_z W_h U_r U_z U_h b_r b_z b_h,
//   backward W_r W_z W_h U_r U_z U_h b_r b_z b_h,
//   W_f W_b b_combine, W_out b_out.
struct ModelParams {
  EncoderParams encoder;
  SoftmaxParams softmax;

  static ModelParams zeros(const ModelDims& dims);
  // Weights ~ N(0, sigma^2) drawn in tensors() order, biases zero.
  static ModelParams initialize(const ModelDims& dims, double sigma, SeededRng& rng);

  ModelDims dims() const;
  void validate() const;

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  static const std::vector<std::string>& tensor_names();
  static bool is_bias(std::size_t tensor_index);
  // Tensors entering the L2 penalty.
  std::vector<const Matrix*> regularized(bool include_biases) const;
  std::vector<Matrix*> regularized(bool include_biases);

  std::size_t scalar_count() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

struct BatchLoss {
  LossValue value;
  Matrix probabilities;
};

// Forward and backward pass over one batch. Writes the full gradient of the
// regularized objective into `grads` (overwriting it).
BatchLoss compute_gradients(const ModelParams& params, const PaddedBatch& batch,
                            const Matrix& targets, double lambda, bool regularize_biases,
                            ModelParams& grads);

// Objective value without gradients.
BatchLoss evaluate_loss(const ModelParams& params, const PaddedBatch& batch,
                        const Matrix& targets, double lambda, bool regularize_biases);

Matrix predict_posteriors(const ModelParams& params, const PaddedBatch& batch);

// A trained encoder together with its input and output vocabularies.
struct Model {
  SymbolTable symbols;
  std::vector<std::string> labels;
  ModelParams params;

  ModelKind kind() const { return symbols.kind(); }
};

}  // namespace t2v

#endif  // T2V_MODEL_HPP_
