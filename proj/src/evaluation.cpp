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

#include "t2v/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>

namespace t2v {

RankedPrediction rank(std::span<const double> posterior, std::size_t example_id) {
  RankedPrediction r;
  r.example_id = example_id;
  r.order.resize(posterior.size());
  std::iota(r.order.begin(), r.order.end(), std::uint32_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return posterior[a] > posterior[b];
  });
  r.scores.reserve(posterior.size());
  for (std::uint32_t l : r.order) r.scores.push_back(posterior[l]);
  return r;
}

EvalReport metrics(std::span<const RankedPrediction> predictions,
                   std::span<const std::vector<std::uint32_t>> gold, MeanRankMode mode) {
  if (predictions.size() != gold.size()) {
    throw std::invalid_argument("metrics: " + std::to_string(predictions.size()) +
                                " predictions for " + std::to_string(gold.size()) + " gold sets");
  }
  EvalReport report;
  double hits_at_1 = 0.0;
  double recall = 0.0;
  double rank_sum = 0.0;
  std::size_t rank_terms = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& pred = predictions[i];
    const auto& g = gold[i];
    if (g.empty()) throw std::logic_error("metrics: example " + std::to_string(i) + " has no gold");

    std::vector<std::size_t> position(pred.order.size());
    for (std::size_t k = 0; k < pred.order.size(); ++k) position.at(pred.order[k]) = k + 1;

    ExampleRecord rec{pred, g, {}};
    std::size_t in_top = 0;
    double example_rank = 0.0;
    for (std::uint32_t label : g) {
      const std::size_t r = position.at(label);
      rec.gold_ranks.push_back(r);
      if (r <= kRecallCutoff) ++in_top;
      example_rank += static_cast<double>(r);
    }
    if (!pred.order.empty() && std::find(g.begin(), g.end(), pred.order.front()) != g.end()) {
      hits_at_1 += 1.0;
    }
    recall += static_cast<double>(in_top) / static_cast<double>(g.size());
    if (mode == MeanRankMode::kPerGoldPair) {
      rank_sum += example_rank;
      rank_terms += g.size();
    } else {
      rank_sum += example_rank / static_cast<double>(g.size());
      rank_terms += 1;
    }
    report.examples.push_back(std::move(rec));
  }
  report.evaluated = predictions.size();
  if (report.evaluated > 0) {
    const double n = static_cast<double>(report.evaluated);
    report.precision_at_1 = hits_at_1 / n;
    report.recall_at_10 = recall / n;
    report.mean_rank = rank_sum / static_cast<double>(rank_terms);
  }
  return report;
}

EvalReport evaluate(const ModelParams& params, const SymbolTable& symbols,
                    std::span<const LabeledExample> dataset, std::size_t batch_size,
                    MeanRankMode mode) {
  if (symbols.size() != params.encoder.symbols()) {
    throw ConfigError("symbol table has " + std::to_string(symbols.size()) +
                      " entries but the embedding table has " +
                      std::to_string(params.encoder.symbols()) + " rows");
  }
  const std::size_t labels = params.softmax.labels();
  std::vector<RankedPrediction> predictions(dataset.size());
  std::vector<std::vector<std::uint32_t>> gold(dataset.size());
  const auto batches =
      make_batches(dataset, symbols, labels, batch_size == 0 ? 1 : batch_size, nullptr);
  for (const Batch& b : batches) {
    const Matrix p = predict_posteriors(params, b.inputs);
    for (std::size_t r = 0; r < b.example_ids.size(); ++r) {
      const std::size_t id = b.example_ids[r];
      predictions[id] = rank(p.row(r), id);
      gold[id] = dataset[id].labels;
    }
  }
  return metrics(predictions, gold, mode);
}

void write_report(std::ostream& out, const EvalReport& report) {
  const auto old = out.precision();
  out << std::setprecision(17);
  out << "precision_at_1=" << report.precision_at_1 << '\n'
      << "recall_at_10=" << report.recall_at_10 << '\n'
      << "mean_rank=" << report.mean_rank << '\n'
      << "evaluated=" << report.evaluated << '\n'
      << "dropped=" << report.dropped << '\n';
  out.precision(old);
}

void write_ranked_lists(std::ostream& out, const EvalReport& report,
                        std::span<const std::string> label_names, std::size_t top_k) {
  for (const auto& rec : report.examples) {
    out << rec.prediction.example_id << '\t';
    for (std::size_t k = 0; k < rec.gold.size(); ++k) {
      out << (k > 0 ? "," : "") << label_names[rec.gold[k]];
    }
    const std::size_t n = std::min(top_k, rec.prediction.order.size());
    for (std::size_t k = 0; k < n; ++k) {
      out << '\t' << label_names[rec.prediction.order[k]] << ':' << rec.prediction.scores[k];
    }
    out << '\n';
  }
}

}  // namespace t2v
