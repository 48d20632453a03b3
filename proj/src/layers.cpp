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

#include "t2v/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace t2v {

namespace {

void expect_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(name) + " has shape " + m.shape_string() + ", expected (" +
                     std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
}

std::span<const double> embedding_row(const Matrix& embedding, std::uint32_t index,
                                      std::size_t position) {
  if (index >= embedding.rows()) {
    throw IndexError("symbol index " + std::to_string(index) + " at position " +
                     std::to_string(position) + " is outside the embedding table of " +
                     std::to_string(embedding.rows()) + " rows");
  }
  return embedding.row(index);
}

std::vector<double> combine(const EncoderParams& p, std::span<const double> h_forward,
                            std::span<const double> h_backward) {
  std::vector<double> e(p.b_combine.data().begin(), p.b_combine.data().end());
  gemv_accumulate(p.w_f, h_forward, e);
  gemv_accumulate(p.w_b, h_backward, e);
  return e;
}

// Runs one direction of one padded row. `reverse` walks positions from the
// end; masked positions carry the state forward unchanged.
EncoderTape::Direction run_direction(const GruParams& gru, const Matrix& embedding,
                                     const PaddedBatch& batch, std::size_t example,
                                     bool reverse) {
  EncoderTape::Direction dir;
  std::vector<double> h(gru.hidden_dim(), 0.0);
  for (std::size_t k = 0; k < batch.max_length; ++k) {
    const std::size_t t = reverse ? batch.max_length - 1 - k : k;
    if (batch.mask(example, t) == 0.0) continue;
    auto x = embedding_row(embedding, batch.index(example, t), t);
    GruStep step = gru_step_full(gru, x, h);
    dir.positions.push_back(t);
    dir.h_prev.push_back(h);
    h = step.hidden;
    dir.steps.push_back(std::move(step));
  }
  dir.final_state = std::move(h);
  return dir;
}

// BPTT through one direction; returns nothing, accumulates into `g` and the
// embedding gradient.
void backprop_direction(const GruParams& p, const Matrix& embedding, const PaddedBatch& batch,
                        std::size_t example, const EncoderTape::Direction& dir,
                        std::vector<double> dh, GruParams& g, Matrix& d_embedding) {
  const std::size_t hd = p.hidden_dim();
  const std::size_t in = p.input_dim();
  std::vector<double> da_r(hd), da_z(hd), da_h(hd), rh(hd), d_rh(hd), dh_prev(hd), dx(in);

  for (std::size_t s = dir.steps.size(); s-- > 0;) {
    const GruStep& st = dir.steps[s];
    const std::vector<double>& h_prev = dir.h_prev[s];
    const std::uint32_t symbol = batch.index(example, dir.positions[s]);
    auto x = embedding.row(symbol);

    for (std::size_t j = 0; j < hd; ++j) {
      const double z = st.update[j];
      const double c = st.candidate[j];
      const double dz = dh[j] * (c - h_prev[j]);
      const double dc = dh[j] * z;
      dh_prev[j] = dh[j] * (1.0 - z);
      da_h[j] = dc * (1.0 - c * c);
      da_z[j] = dz * z * (1.0 - z);
      rh[j] = st.reset[j] * h_prev[j];
    }

    std::fill(d_rh.begin(), d_rh.end(), 0.0);
    gemv_transpose_accumulate(p.u_h, da_h, d_rh);
    for (std::size_t j = 0; j < hd; ++j) {
      const double r = st.reset[j];
      da_r[j] = d_rh[j] * h_prev[j] * r * (1.0 - r);
      dh_prev[j] += d_rh[j] * r;
    }

    outer_accumulate(da_r, x, g.w_r);
    outer_accumulate(da_z, x, g.w_z);
    outer_accumulate(da_h, x, g.w_h);
    outer_accumulate(da_r, h_prev, g.u_r);
    outer_accumulate(da_z, h_prev, g.u_z);
    outer_accumulate(da_h, rh, g.u_h);
    for (std::size_t j = 0; j < hd; ++j) {
      g.b_r[j] += da_r[j];
      g.b_z[j] += da_z[j];
      g.b_h[j] += da_h[j];
    }

    gemv_transpose_accumulate(p.u_r, da_r, dh_prev);
    gemv_transpose_accumulate(p.u_z, da_z, dh_prev);

    std::fill(dx.begin(), dx.end(), 0.0);
    gemv_transpose_accumulate(p.w_r, da_r, dx);
    gemv_transpose_accumulate(p.w_z, da_z, dx);
    gemv_transpose_accumulate(p.w_h, da_h, dx);
    auto row = d_embedding.row(symbol);
    for (std::size_t k = 0; k < in; ++k) row[k] += dx[k];

    dh.swap(dh_prev);
  }
}

}  // namespace

GruParams GruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  p.w_r = p.w_z = p.w_h = Matrix(hidden_dim, input_dim);
  p.u_r = p.u_z = p.u_h = Matrix(hidden_dim, hidden_dim);
  p.b_r = p.b_z = p.b_h = Matrix(hidden_dim, 1);
  return p;
}

void GruParams::validate() const {
  const std::size_t hd = hidden_dim();
  const std::size_t in = input_dim();
  expect_shape(w_z, hd, in, "W_z");
  expect_shape(w_h, hd, in, "W_h");
  expect_shape(u_r, hd, hd, "U_r");
  expect_shape(u_z, hd, hd, "U_z");
  expect_shape(u_h, hd, hd, "U_h");
  expect_shape(b_r, hd, 1, "b_r");
  expect_shape(b_z, hd, 1, "b_z");
  expect_shape(b_h, hd, 1, "b_h");
}

EncoderParams EncoderParams::zeros(std::size_t symbols, std::size_t input_dim,
                                   std::size_t hidden_dim, std::size_t output_dim) {
  EncoderParams p;
  p.embedding = Matrix(symbols, input_dim);
  p.forward = GruParams::zeros(input_dim, hidden_dim);
  p.backward = GruParams::zeros(input_dim, hidden_dim);
  p.w_f = Matrix(output_dim, hidden_dim);
  p.w_b = Matrix(output_dim, hidden_dim);
  p.b_combine = Matrix(output_dim, 1);
  return p;
}

void EncoderParams::validate() const {
  forward.validate();
  backward.validate();
  const std::size_t hd = hidden_dim();
  if (forward.input_dim() != input_dim() || backward.input_dim() != input_dim()) {
    throw ShapeError("GRU input width does not match embedding width " +
                     std::to_string(input_dim()));
  }
  expect_shape(backward.w_r, hd, input_dim(), "backward W_r");
  expect_shape(w_f, output_dim(), hd, "W_f");
  expect_shape(w_b, output_dim(), hd, "W_b");
  expect_shape(b_combine, output_dim(), 1, "b_combine");
}

Matrix lookup(const Matrix& embedding, const EncodedSequence& seq) {
  if (seq.length() == 0) throw ShapeError("lookup: empty sequence");
  Matrix out(seq.length(), embedding.cols());
  for (std::size_t t = 0; t < seq.length(); ++t) {
    auto src = embedding_row(embedding, seq.indices[t], t);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

GruStep gru_step_full(const GruParams& p, std::span<const double> x,
                      std::span<const double> h_prev) {
  const std::size_t hd = p.hidden_dim();
  if (x.size() != p.input_dim() || h_prev.size() != hd) {
    throw ShapeError("gru_step: input width " + std::to_string(x.size()) + " / state width " +
                     std::to_string(h_prev.size()) + " against parameters " +
                     p.w_r.shape_string());
  }
  GruStep s;
  s.reset.assign(p.b_r.data().begin(), p.b_r.data().end());
  s.update.assign(p.b_z.data().begin(), p.b_z.data().end());
  s.candidate.assign(p.b_h.data().begin(), p.b_h.data().end());

  gemv_accumulate(p.w_r, x, s.reset);
  gemv_accumulate(p.u_r, h_prev, s.reset);
  gemv_accumulate(p.w_z, x, s.update);
  gemv_accumulate(p.u_z, h_prev, s.update);
  for (std::size_t j = 0; j < hd; ++j) {
    s.reset[j] = sigmoid(s.reset[j]);
    s.update[j] = sigmoid(s.update[j]);
  }

  std::vector<double> gated(hd);
  for (std::size_t j = 0; j < hd; ++j) gated[j] = s.reset[j] * h_prev[j];
  gemv_accumulate(p.w_h, x, s.candidate);
  gemv_accumulate(p.u_h, gated, s.candidate);

  s.hidden.resize(hd);
  for (std::size_t j = 0; j < hd; ++j) {
    s.candidate[j] = std::tanh(s.candidate[j]);
    s.hidden[j] = (1.0 - s.update[j]) * h_prev[j] + s.update[j] * s.candidate[j];
  }
  return s;
}

std::vector<double> gru_step(const GruParams& p, std::span<const double> x,
                             std::span<const double> h_prev) {
  return gru_step_full(p, x, h_prev).hidden;
}

std::vector<double> encode(const EncoderParams& p, const EncodedSequence& seq) {
  const Matrix xs = lookup(p.embedding, seq);
  const std::size_t m = seq.length();
  std::vector<double> hf(p.hidden_dim(), 0.0);
  for (std::size_t t = 0; t < m; ++t) hf = gru_step(p.forward, xs.row(t), hf);
  std::vector<double> hb(p.hidden_dim(), 0.0);
  for (std::size_t t = m; t-- > 0;) hb = gru_step(p.backward, xs.row(t), hb);
  return combine(p, hf, hb);
}

PaddedBatch PaddedBatch::from_sequences(std::span<const EncodedSequence> sequences) {
  if (sequences.empty()) throw ShapeError("batch must not be empty");
  PaddedBatch b;
  for (const auto& s : sequences) {
    if (s.length() == 0) throw ShapeError("batch contains an empty sequence");
    b.max_length = std::max(b.max_length, s.length());
    b.lengths.push_back(s.length());
  }
  b.indices.assign(sequences.size() * b.max_length, kPadIndex);
  b.mask = Matrix(sequences.size(), b.max_length);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    for (std::size_t t = 0; t < sequences[i].length(); ++t) {
      b.indices[i * b.max_length + t] = sequences[i].indices[t];
      b.mask(i, t) = 1.0;
    }
  }
  return b;
}

EncoderTape encode_batch_recorded(const EncoderParams& p, const PaddedBatch& batch) {
  if (batch.batch_size() == 0) throw ShapeError("batch must not be empty");
  EncoderTape tape;
  tape.batch = batch;
  tape.encodings = Matrix(batch.batch_size(), p.output_dim());
  tape.forward.reserve(batch.batch_size());
  tape.backward.reserve(batch.batch_size());
  for (std::size_t i = 0; i < batch.batch_size(); ++i) {
    tape.forward.push_back(run_direction(p.forward, p.embedding, batch, i, false));
    tape.backward.push_back(run_direction(p.backward, p.embedding, batch, i, true));
    const auto e = combine(p, tape.forward.back().final_state, tape.backward.back().final_state);
    std::copy(e.begin(), e.end(), tape.encodings.row(i).begin());
  }
  tape.recorded = true;
  return tape;
}

Matrix encode_batch(const EncoderParams& p, const PaddedBatch& batch) {
  return encode_batch_recorded(p, batch).encodings;
}

void encoder_backward(const EncoderParams& p, const EncoderTape& tape, const Matrix& upstream,
                      EncoderParams& grads) {
  if (!tape.recorded) throw StateError("encoder backward called without a recorded forward pass");
  const std::size_t n = tape.batch.batch_size();
  expect_shape(upstream, n, p.output_dim(), "upstream gradient");
  const std::size_t hd = p.hidden_dim();

  for (std::size_t i = 0; i < n; ++i) {
    auto de = upstream.row(i);
    const auto& fwd = tape.forward[i];
    const auto& bwd = tape.backward[i];
    outer_accumulate(de, fwd.final_state, grads.w_f);
    outer_accumulate(de, bwd.final_state, grads.w_b);
    for (std::size_t k = 0; k < de.size(); ++k) grads.b_combine[k] += de[k];

    std::vector<double> dh_f(hd, 0.0), dh_b(hd, 0.0);
    gemv_transpose_accumulate(p.w_f, de, dh_f);
    gemv_transpose_accumulate(p.w_b, de, dh_b);
    backprop_direction(p.forward, p.embedding, tape.batch, i, fwd, std::move(dh_f),
                       grads.forward, grads.embedding);
    backprop_direction(p.backward, p.embedding, tape.batch, i, bwd, std::move(dh_b),
                       grads.backward, grads.embedding);
  }
}

}  // namespace t2v
