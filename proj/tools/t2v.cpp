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

// t2v: command-line front end for dataset preparation, training,
// evaluation, prediction and encoding.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "t2v/checkpoint.hpp"
#include "t2v/data.hpp"
#include "t2v/evaluation.hpp"
#include "t2v/optimizer.hpp"

namespace fs = std::filesystem;
using namespace t2v;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kDivergence = 3 };

// Data-side failures (missing files, malformed lines, bad checkpoints).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::vector<CleanedPost> read_dataset_file(const fs::path& path) {
  auto in = open_input(path);
  try {
    return read_dataset(in);
  } catch (const DataError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------- make-dataset

struct MakeDatasetOptions {
  fs::path input;
  std::string format = "tsv";
  fs::path output_dir;
  std::string language = "en";
  SplitConfig split;
  std::size_t vocabulary_size = kDefaultVocabularySize;
  std::size_t oov_set_size = 0;
};

int make_dataset(const MakeDatasetOptions& o) {
  auto in = open_input(o.input);
  std::vector<RawPost> raw;
  try {
    raw = read_raw_posts(in, o.format == "text" ? RawFormat::kPlainText
                                                : RawFormat::kTabSeparated);
  } catch (const DataError& e) {
    throw InputError(o.input.string() + ": " + e.what());
  }
  RejectionCounts rejected;
  std::vector<CleanedPost> posts;
  for (const auto& r : raw) {
    auto result = preprocess(r, o.language);
    if (result.accepted())
      posts.push_back(std::move(*result.post));
    else
      rejected.add(result.rejection);
  }
  const DatasetSplit split = split_dataset(std::move(posts), o.split);

  fs::create_directories(o.output_dir);
  auto write = [&](const std::string& name, std::span<const LabeledExample> examples) {
    std::ostringstream os;
    write_dataset(os, examples, split.labels);
    write_file_atomic(o.output_dir / name, os.str());
  };
  write("train.tsv", split.train);
  write("validation.tsv", split.validation);
  write("test.tsv", split.test);
  if (o.oov_set_size > 0) {
    const WordVocab vocab = build_word_vocab(split.train, o.vocabulary_size);
    const OovTestSets sets = select_oov_testsets(split.test, vocab, o.oov_set_size);
    auto pick = [&](const std::vector<std::size_t>& ids) {
      std::vector<LabeledExample> out;
      for (std::size_t id : ids) out.push_back(split.test[id]);
      return out;
    };
    write("rare_words.tsv", pick(sets.rare));
    write("frequent_words.tsv", pick(sets.frequent));
  }

  std::cerr << "read " << raw.size() << " posts, kept " << raw.size() - rejected.total()
            << "\n";
  for (auto kind : {Rejection::kRetweet, Rejection::kLanguage, Rejection::kNoHashtag,
                    Rejection::kEmptyAfterClean})
    std::cerr << "rejected " << to_string(kind) << ": " << rejected[kind] << "\n";
  std::cerr << "labels: " << split.labels.size() << ", train " << split.train.size()
            << ", validation " << split.validation.size() << ", test " << split.test.size()
            << "\n";
  return kOk;
}

// ----------------------------------------------------------------------- train

struct TrainOptions {
  std::string model = "character";
  fs::path train_path;
  fs::path validation_path;
  fs::path output_dir;
  TrainConfig config;
  std::size_t input_dim = 150;
  std::size_t hidden_dim = 0;  // 0 picks the per-model default
  std::size_t vocabulary_size = kDefaultVocabularySize;
  std::size_t min_count = 0;  // 0 disables label filtering
  std::size_t max_count = 0;
};

std::vector<std::pair<std::string, std::string>> config_echo(const TrainOptions& o) {
  const TrainConfig& c = o.config;
  return {{"model", o.model},
          {"batch-size", std::to_string(c.batch_size)},
          {"eta0", format_double(c.eta0)},
          {"mu0", format_double(c.mu0)},
          {"lambda", format_double(c.lambda)},
          {"init-sigma", format_double(c.init_sigma)},
          {"halving-threshold", format_double(c.halving_threshold)},
          {"patience", std::to_string(c.patience)},
          {"max-epochs", std::to_string(c.max_epochs)},
          {"regularize-biases", c.regularize_biases ? "true" : "false"},
          {"vocabulary-size", std::to_string(o.vocabulary_size)},
          {"min-count", std::to_string(o.min_count)},
          {"max-count", std::to_string(o.max_count)}};
}

void write_lines(const fs::path& path, std::size_t first_index,
                 std::span<const std::string> items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << first_index + i << '\t' << items[i] << '\n';
  write_file_atomic(path, os.str());
}

int train_command(TrainOptions o) {
  const ModelKind kind = parse_model_kind(o.model);
  if (o.hidden_dim == 0) o.hidden_dim = kind == ModelKind::kCharacter ? 500 : 200;
  o.config.validate();

  const auto train_posts = read_dataset_file(o.train_path);
  const auto val_posts =
      o.validation_path.empty() ? train_posts : read_dataset_file(o.validation_path);
  const LabelSet labels =
      o.min_count == 0 && o.max_count == 0
          ? collect_labels(train_posts)
          : filter_hashtags(train_posts, o.min_count,
                            o.max_count == 0 ? std::numeric_limits<std::size_t>::max()
                                             : o.max_count);
  std::size_t dropped_train = 0, dropped_val = 0;
  const auto train = apply_labels(train_posts, labels, &dropped_train);
  const auto validation = apply_labels(val_posts, labels, &dropped_val);
  if (train.empty()) throw InputError(o.train_path.string() + ": no labelled examples");
  if (validation.empty()) throw InputError("validation set has no labelled examples");

  const SymbolTable symbols = kind == ModelKind::kCharacter
                                  ? SymbolTable(build_alphabet(train))
                                  : SymbolTable(build_word_vocab(train, o.vocabulary_size));
  SeededRng rng(o.config.seed);
  const ModelParams init = ModelParams::initialize(
      {symbols.size(), o.input_dim, o.hidden_dim, o.hidden_dim, labels.size()},
      o.config.init_sigma, rng);

  fs::create_directories(o.output_dir);
  std::ofstream log(o.output_dir / "train.log");
  if (!log) throw InputError("cannot write " + (o.output_dir / "train.log").string());
  std::cerr << "train " << train.size() << " (dropped " << dropped_train << "), validation "
            << validation.size() << " (dropped " << dropped_val << "), labels "
            << labels.size() << ", symbols " << symbols.size() << "\n";

  const TrainResult result =
      t2v::train(init, symbols, train, validation, o.config,
                 [&](const EpochRecord& record, const ModelParams&) {
                   write_epoch_record(log, record);
                   log.flush();
                   write_epoch_record(std::cerr, record);
                 });

  const auto echo = config_echo(o);
  auto save = [&](const std::string& name, const ModelParams& params) {
    save_checkpoint(o.output_dir / name,
                    Checkpoint{Model{symbols, labels.names(), params}, SeededRng::kAlgorithm,
                               o.config.seed, echo});
  };
  save("best.ckpt", result.best);
  save("final.ckpt", result.last);
  write_lines(o.output_dir / "symbols.txt", kReservedSymbols, symbols.symbol_strings());
  write_lines(o.output_dir / "labels.txt", 0, labels.names());
  std::cerr << "best validation P@1 " << result.best_val_p1 << " at epoch " << result.best_epoch
            << "\n";
  return kOk;
}

// -------------------------------------------------------------------- evaluate

struct EvaluateOptions {
  fs::path checkpoint;
  fs::path data;
  std::size_t batch_size = 64;
  std::string mean_rank = "pair";
  fs::path ranked_output;
  std::size_t top_k = 10;
};

Checkpoint load(const fs::path& path) {
  if (!fs::exists(path)) throw InputError("cannot open " + path.string());
  return load_checkpoint(path);
}

int evaluate_command(const EvaluateOptions& o) {
  const Checkpoint ck = load(o.checkpoint);
  const auto posts = read_dataset_file(o.data);
  const LabelSet labels = LabelSet::from_names(ck.model.labels, {});
  std::size_t dropped = 0;
  const auto examples = apply_labels(posts, labels, &dropped);
  EvalReport report = evaluate(ck.model.params, ck.model.symbols, examples, o.batch_size,
                               o.mean_rank == "example" ? MeanRankMode::kPerExample
                                                        : MeanRankMode::kPerGoldPair);
  report.dropped = dropped;
  write_report(std::cout, report);
  if (!o.ranked_output.empty()) {
    std::ostringstream os;
    write_ranked_lists(os, report, ck.model.labels, o.top_k);
    write_file_atomic(o.ranked_output, os.str());
  }
  return kOk;
}

// ------------------------------------------------------------ predict / encode

// Cleans one input line the same way training text was cleaned. Returns an
// empty string for lines with nothing left to encode.
std::string prepare_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return clean_text(line).text;
}

template <typename Emit>
int stream_lines(const Checkpoint& ck, Emit emit) {
  std::string line;
  std::size_t skipped = 0;
  while (std::getline(std::cin, line)) {
    const std::string text = prepare_line(line);
    if (text.empty()) {
      ++skipped;
      continue;
    }
    const EncodedSequence seq = ck.model.symbols.encode(text);
    const Matrix e = encode_batch(ck.model.params.encoder,
                                  PaddedBatch::from_sequences(std::span(&seq, 1)));
    emit(e);
  }
  if (skipped > 0) std::cerr << "warning: skipped " << skipped << " empty line(s)\n";
  return kOk;
}

int predict_command(const fs::path& checkpoint, std::size_t top_k) {
  const Checkpoint ck = load(checkpoint);
  const std::size_t k = std::min(top_k, ck.model.labels.size());
  return stream_lines(ck, [&](const Matrix& e) {
    const Matrix p = posteriors(ck.model.params.softmax, e);
    const RankedPrediction ranked = rank(p.row(0));
    for (std::size_t j = 0; j < k; ++j) {
      if (j > 0) std::cout << '\t';
      std::cout << ck.model.labels[ranked.order[j]] << ' ' << format_double(ranked.scores[j]);
    }
    std::cout << '\n';
  });
}

int encode_command(const fs::path& checkpoint) {
  const Checkpoint ck = load(checkpoint);
  return stream_lines(ck, [&](const Matrix& e) {
    for (std::size_t j = 0; j < e.cols(); ++j) {
      if (j > 0) std::cout << ' ';
      std::cout << format_double(e(0, j));
    }
    std::cout << '\n';
  });
}

// ---------------------------------------------------------------- count-params

struct CountOptions {
  fs::path checkpoint;
  std::string model = "character";
  std::size_t vocabulary = 2829;
  std::size_t input_dim = 150;
  std::size_t hidden_dim = 0;
  std::size_t labels = 2039;
  std::string mode = "paper-raw";
};

int count_command(CountOptions o) {
  const CountMode mode = o.mode == "actual" ? CountMode::kActual : CountMode::kPaperRaw;
  if (!o.checkpoint.empty()) {
    const Checkpoint ck = load(o.checkpoint);
    const ModelDims d = ck.model.params.dims();
    const ModelKind kind = ck.model.kind();
    // Allocated rows carry PAD and UNK; the raw vocabulary excludes both.
    const std::size_t vocabulary = d.symbols - kReservedSymbols;
    std::cout << count_params(kind, vocabulary, d.input_dim, d.hidden_dim, d.output_dim,
                              d.labels, mode)
              << '\n';
    return kOk;
  }
  const ModelKind kind = parse_model_kind(o.model);
  if (o.hidden_dim == 0) o.hidden_dim = kind == ModelKind::kCharacter ? 500 : 200;
  std::cout << count_params(kind, o.vocabulary, o.input_dim, o.hidden_dim, o.hidden_dim, o.labels,
                            mode)
            << '\n';
  return kOk;
}

void add_train_config(CLI::App* cmd, TrainConfig& c) {
  cmd->add_option("--batch-size", c.batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--eta0", c.eta0, "Initial learning rate")->capture_default_str();
  cmd->add_option("--mu0", c.mu0, "Nesterov momentum")->capture_default_str();
  cmd->add_option("--lambda", c.lambda, "L2 coefficient")->capture_default_str();
  cmd->add_option("--init-sigma", c.init_sigma, "Weight init standard deviation")
      ->capture_default_str();
  cmd->add_option("--halving-threshold", c.halving_threshold,
                  "Validation P@1 gain (percentage points) below which the rate halves")
      ->capture_default_str();
  cmd->add_option("--patience", c.patience, "Epochs without improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--max-epochs", c.max_epochs)->capture_default_str();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--regularize-biases", c.regularize_biases)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Character-level bi-GRU hashtag prediction and post encoding"};
  app.require_subcommand(1);

  MakeDatasetOptions md;
  auto* make = app.add_subcommand("make-dataset", "Clean raw posts and split them");
  make->add_option("--input", md.input, "Raw posts")->required();
  make->add_option("--format", md.format, "tsv (lang<TAB>retweet<TAB>text) or text")
      ->check(CLI::IsMember({"tsv", "text"}))
      ->capture_default_str();
  make->add_option("--output-dir", md.output_dir)->required();
  make->add_option("--language", md.language)->capture_default_str();
  make->add_option("--min-count", md.split.min_count)->capture_default_str();
  make->add_option("--max-count", md.split.max_count)->capture_default_str();
  make->add_option("--validation-size", md.split.validation_size)->capture_default_str();
  make->add_option("--test-size", md.split.test_size)->capture_default_str();
  make->add_option("--seed", md.split.seed)->capture_default_str();
  make->add_option("--vocabulary-size", md.vocabulary_size)->capture_default_str();
  make->add_option("--oov-set-size", md.oov_set_size,
                   "Also write rare/frequent word test subsets of this size (0: skip)")
      ->capture_default_str();

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a model and write checkpoints");
  train->add_option("--model", tr.model)
      ->check(CLI::IsMember({"character", "char", "word"}))
      ->capture_default_str();
  train->add_option("--train", tr.train_path, "Training dataset")->required();
  train->add_option("--validation", tr.validation_path,
                    "Validation dataset (default: the training set)");
  train->add_option("--output-dir", tr.output_dir)->required();
  train->add_option("--input-dim", tr.input_dim, "Symbol embedding size")->capture_default_str();
  train->add_option("--hidden-dim", tr.hidden_dim,
                    "GRU state and post embedding size (default 500 character, 200 word)");
  train->add_option("--vocabulary-size", tr.vocabulary_size)->capture_default_str();
  train->add_option("--min-count", tr.min_count, "Keep tags with at least this many posts");
  train->add_option("--max-count", tr.max_count, "Keep tags with at most this many posts");
  add_train_config(train, tr.config);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint on a dataset");
  evaluate->add_option("--checkpoint", ev.checkpoint)->required();
  evaluate->add_option("--data", ev.data)->required();
  evaluate->add_option("--batch-size", ev.batch_size)->capture_default_str();
  evaluate->add_option("--mean-rank", ev.mean_rank, "pair or example averaging")
      ->check(CLI::IsMember({"pair", "example"}))
      ->capture_default_str();
  evaluate->add_option("--ranked-output", ev.ranked_output, "Write per-example ranked lists");
  evaluate->add_option("--top-k", ev.top_k, "Length of ranked lists")->capture_default_str();

  fs::path predict_ckpt;
  std::size_t top_k = 10;
  auto* predict = app.add_subcommand("predict", "Top hashtags for each stdin line");
  predict->add_option("--checkpoint", predict_ckpt)->required();
  predict->add_option("--top-k", top_k)->check(CLI::PositiveNumber)->capture_default_str();

  fs::path encode_ckpt;
  auto* encode = app.add_subcommand("encode", "Post embedding for each stdin line");
  encode->add_option("--checkpoint", encode_ckpt)->required();

  CountOptions co;
  auto* count = app.add_subcommand("count-params", "Number of learnable parameters");
  count->add_option("--checkpoint", co.checkpoint, "Count a saved model instead");
  count->add_option("--model", co.model)
      ->check(CLI::IsMember({"character", "char", "word"}))
      ->capture_default_str();
  count->add_option("--vocabulary", co.vocabulary, "Characters or word types")
      ->capture_default_str();
  count->add_option("--input-dim", co.input_dim)->capture_default_str();
  count->add_option("--hidden-dim", co.hidden_dim, "(default 500 character, 200 word)");
  count->add_option("--labels", co.labels)->capture_default_str();
  count->add_option("--mode", co.mode)
      ->check(CLI::IsMember({"paper-raw", "actual"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*make) return make_dataset(md);
    if (*train) return train_command(tr);
    if (*evaluate) return evaluate_command(ev);
    if (*predict) return predict_command(predict_ckpt, top_k);
    if (*encode) return encode_command(encode_ckpt);
    if (*count) return count_command(co);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDivergence;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
