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

#include "t2v/model.hpp"

namespace t2v {

namespace {

template <typename M, typename P>
std::vector<M*> collect(P& p) {
  auto& e = p.encoder;
  std::vector<M*> out{&e.embedding};
  for (auto* g : {&e.forward, &e.backward}) {
    out.insert(out.end(), {&g->w_r, &g->w_z, &g->w_h, &g->u_r, &g->u_z, &g->u_h, &g->b_r,
                           &g->b_z, &g->b_h});
  }
  out.insert(out.end(), {&e.w_f, &e.w_b, &e.b_combine, &p.softmax.w_out, &p.softmax.b_out});
  return out;
}

}  // namespace

ModelParams ModelParams::zeros(const ModelDims& d) {
  if (d.output_dim != d.hidden_dim) {
    throw ShapeError("embedding dimension d_t (" + std::to_string(d.output_dim) +
                     ") must equal hidden dimension d_h (" + std::to_string(d.hidden_dim) + ")");
  }
  ModelParams p;
  p.encoder = EncoderParams::zeros(d.symbols, d.input_dim, d.hidden_dim, d.output_dim);
  p.softmax = SoftmaxParams::zeros(d.labels, d.output_dim);
  p.validate();
  return p;
}

ModelParams ModelParams::initialize(const ModelDims& dims, double sigma, SeededRng& rng) {
  ModelParams p = zeros(dims);
  auto ts = p.tensors();
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (is_bias(k)) continue;
    for (double& v : ts[k]->data()) v = sigma * rng.normal();
  }
  return p;
}

ModelDims ModelParams::dims() const {
  return {encoder.symbols(), encoder.input_dim(), encoder.hidden_dim(), encoder.output_dim(),
          softmax.labels()};
}

void ModelParams::validate() const {
  encoder.validate();
  softmax.validate();
  if (softmax.w_out.cols() != encoder.output_dim()) {
    throw ShapeError("softmax input width " + std::to_string(softmax.w_out.cols()) +
                     " does not match encoder output " + std::to_string(encoder.output_dim()));
  }
}

std::vector<Matrix*> ModelParams::tensors() { return collect<Matrix>(*this); }
std::vector<const Matrix*> ModelParams::tensors() const {
  return collect<const Matrix>(*this);
}

const std::vector<std::string>& ModelParams::tensor_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"embedding"};
    for (const char* dir : {"forward", "backward"}) {
      for (const char* t : {"W_r", "W_z", "W_h", "U_r", "U_z", "U_h", "b_r", "b_z", "b_h"}) {
        n.push_back(std::string(dir) + "." + t);
      }
    }
    n.insert(n.end(), {"W_f", "W_b", "b_combine", "W_out", "b_out"});
    return n;
  }();
  return names;
}

bool ModelParams::is_bias(std::size_t tensor_index) {
  return tensor_names().at(tensor_index).find(".b_") != std::string::npos ||
         tensor_names()[tensor_index].starts_with("b_");
}

std::vector<const Matrix*> ModelParams::regularized(bool include_biases) const {
  std::vector<const Matrix*> out;
  auto ts = tensors();
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (include_biases || !is_bias(k)) out.push_back(ts[k]);
  return out;
}

std::vector<Matrix*> ModelParams::regularized(bool include_biases) {
  std::vector<Matrix*> out;
  auto ts = tensors();
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (include_biases || !is_bias(k)) out.push_back(ts[k]);
  return out;
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const Matrix* m : tensors()) n += m->size();
  return n;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  auto ta = a.tensors();
  auto tb = b.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k)
    if (!(*ta[k] == *tb[k])) return false;
  return true;
}

BatchLoss compute_gradients(const ModelParams& params, const PaddedBatch& batch,
                            const Matrix& targets, double lambda, bool regularize_biases,
                            ModelParams& grads) {
  validate_targets(targets);
  grads = ModelParams::zeros(params.dims());
  const EncoderTape tape = encode_batch_recorded(params.encoder, batch);
  BatchLoss out;
  out.probabilities = posteriors(params.softmax, tape.encodings);
  out.value = loss(out.probabilities, targets, params.regularized(regularize_biases), lambda);

  OutputGradients og = loss_grad(params.softmax, tape.encodings, out.probabilities, targets);
  grads.softmax.w_out = std::move(og.d_w_out);
  grads.softmax.b_out = std::move(og.d_b_out);
  encoder_backward(params.encoder, tape, og.d_embeddings, grads.encoder);
  add_l2_gradient(params.regularized(regularize_biases), lambda,
                  grads.regularized(regularize_biases));
  return out;
}

BatchLoss evaluate_loss(const ModelParams& params, const PaddedBatch& batch,
                        const Matrix& targets, double lambda, bool regularize_biases) {
  BatchLoss out;
  out.probabilities = predict_posteriors(params, batch);
  out.value = loss(out.probabilities, targets, params.regularized(regularize_biases), lambda);
  return out;
}

Matrix predict_posteriors(const ModelParams& params, const PaddedBatch& batch) {
  return posteriors(params.softmax, encode_batch(params.encoder, batch));
}

}  // namespace t2v
