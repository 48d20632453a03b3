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

#ifndef T2V_EVALUATION_HPP_
#define T2V_EVALUATION_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "t2v/data.hpp"
#include "t2v/model.hpp"

namespace t2v {

// All L labels ordered by descending posterior, ties by ascending index.
struct RankedPrediction {
  std::size_t example_id = 0;
  std::vector<std::uint32_t> order;
  std::vector<double> scores;  // posterior of order[k]

  friend bool operator==(const RankedPrediction&, const RankedPrediction&) = default;
};

RankedPrediction rank(std::span<const double> posterior, std::size_t example_id = 0);

enum class MeanRankMode {
  kPerGoldPair,   // average over every (example, gold tag) pair
  kPerExample,    // average within each example first
};

struct ExampleRecord {
  RankedPrediction prediction;
  std::vector<std::uint32_t> gold;
  std::vector<std::size_t> gold_ranks;  // 1-based

  friend bool operator==(const ExampleRecord&, const ExampleRecord&) = default;
};

struct EvalReport {
  double precision_at_1 = 0.0;
  double recall_at_10 = 0.0;
  double mean_rank = 0.0;
  std::size_t evaluated = 0;
  std::size_t dropped = 0;
  std::vector<ExampleRecord> examples;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline constexpr std::size_t kRecallCutoff = 10;

// Gold sets must be nonempty; throws std::logic_error otherwise.
EvalReport metrics(std::span<const RankedPrediction> predictions,
                   std::span<const std::vector<std::uint32_t>> gold,
                   MeanRankMode mode = MeanRankMode::kPerGoldPair);

// Scores `dataset` in batches of `batch_size` (0: one batch per example).
EvalReport evaluate(const ModelParams& params, const SymbolTable& symbols,
                    std::span<const LabeledExample> dataset, std::size_t batch_size = 64,
                    MeanRankMode mode = MeanRankMode::kPerGoldPair);

// Flat key=value lines.
void write_report(std::ostream& out, const EvalReport& report);
// One line per example: id, gold tags, then the top_k predictions.
void write_ranked_lists(std::ostream& out, const EvalReport& report,
                        std::span<const std::string> label_names, std::size_t top_k);

}  // namespace t2v

#endif  // T2V_EVALUATION_HPP_
