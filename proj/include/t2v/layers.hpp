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

#ifndef T2V_LAYERS_HPP_
#define T2V_LAYERS_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "t2v/tensor.hpp"
#include "t2v/vocab.hpp"

namespace t2v {

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One GRU direction. Input matrices are d_h x d_c, recurrent matrices
// d_h x d_h, biases d_h x 1.
struct GruParams {
  Matrix w_r, w_z, w_h;
  Matrix u_r, u_z, u_h;
  Matrix b_r, b_z, b_h;

  static GruParams zeros(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return w_r.cols(); }
  std::size_t hidden_dim() const { return w_r.rows(); }
  void validate() const;
};

// Embedding table plus the two GRU directions and the layer that merges
// their final states. Initial hidden states are fixed at zero.
struct EncoderParams {
  Matrix embedding;  // symbols x d_c
  GruParams forward;
  GruParams backward;
  Matrix w_f;        // d_t x d_h
  Matrix w_b;        // d_t x d_h
  Matrix b_combine;  // d_t x 1

  static EncoderParams zeros(std::size_t symbols, std::size_t input_dim, std::size_t hidden_dim,
                             std::size_t output_dim);

  std::size_t symbols() const { return embedding.rows(); }
  std::size_t input_dim() const { return embedding.cols(); }
  std::size_t hidden_dim() const { return forward.hidden_dim(); }
  std::size_t output_dim() const { return w_f.rows(); }
  void validate() const;
};

// Rows of `embedding` selected by `seq`, one per position.
Matrix lookup(const Matrix& embedding, const EncodedSequence& seq);

// Gate activations of a single step, kept for back-propagation.
struct GruStep {
  std::vector<double> reset;
  std::vector<double> update;
  std::vector<double> candidate;
  std::vector<double> hidden;
};

GruStep gru_step_full(const GruParams& p, std::span<const double> x,
                      std::span<const double> h_prev);
std::vector<double> gru_step(const GruParams& p, std::span<const double> x,
                             std::span<const double> h_prev);

// Tweet embedding for one sequence: forward GRU over the sequence, backward
// GRU over its reverse, final states merged by the combine layer.
std::vector<double> encode(const EncoderParams& p, const EncodedSequence& seq);

// Right-padded batch. mask(i, t) is 1 on real symbols and 0 on padding.
struct PaddedBatch {
  std::size_t max_length = 0;
  std::vector<std::size_t> lengths;
  std::vector<std::uint32_t> indices;  // batch x max_length, row-major
  Matrix mask;                         // batch x max_length

  static PaddedBatch from_sequences(std::span<const EncodedSequence> sequences);

  std::size_t batch_size() const { return lengths.size(); }
  std::uint32_t index(std::size_t example, std::size_t position) const {
    return indices[example * max_length + position];
  }
};

// Everything the backward pass needs from a batched forward pass.
struct EncoderTape {
  struct Direction {
    std::vector<std::size_t> positions;  // symbol position of each real step
    std::vector<std::vector<double>> h_prev;
    std::vector<GruStep> steps;
    std::vector<double> final_state;
  };

  bool recorded = false;
  PaddedBatch batch;
  std::vector<Direction> forward;   // per example
  std::vector<Direction> backward;  // per example
  Matrix encodings;                 // batch x d_t
};

// Batched encode with masking: a padded step leaves the hidden state as is.
EncoderTape encode_batch_recorded(const EncoderParams& p, const PaddedBatch& batch);
Matrix encode_batch(const EncoderParams& p, const PaddedBatch& batch);

// Accumulates d(loss)/d(params) into `grads` given d(loss)/d(encodings).
// `grads` must have the shapes of `p`.
void encoder_backward(const EncoderParams& p, const EncoderTape& tape, const Matrix& upstream,
                      EncoderParams& grads);

}  // namespace t2v

#endif  // T2V_LAYERS_HPP_
