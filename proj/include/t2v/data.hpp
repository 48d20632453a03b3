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

#ifndef T2V_DATA_HPP_
#define T2V_DATA_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "t2v/layers.hpp"
#include "t2v/tensor.hpp"
#include "t2v/vocab.hpp"

namespace t2v {

// Malformed input data. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kUserToken = "!user";
inline constexpr std::string_view kUrlToken = "!url";

struct RawPost {
  std::string text;
  std::optional<bool> is_retweet;  // unset: inferred from a leading "rt @"
  std::string language_tag;        // empty: assumed to be the target language
};

// Cleaned text plus the hashtags pulled out of it (lower-case, without '#',
// first-occurrence order, no duplicates).
struct CleanedPost {
  std::string text;
  std::vector<std::string> hashtags;

  friend bool operator==(const CleanedPost&, const CleanedPost&) = default;
};

enum class Rejection { kRetweet, kLanguage, kNoHashtag, kEmptyAfterClean };
inline constexpr std::size_t kRejectionKinds = 4;
std::string_view to_string(Rejection r);

struct RejectionCounts {
  std::array<std::size_t, kRejectionKinds> counts{};

  void add(Rejection r) { ++counts[static_cast<std::size_t>(r)]; }
  std::size_t operator[](Rejection r) const { return counts[static_cast<std::size_t>(r)]; }
  std::size_t total() const;
};

// Text rules alone: lower-case; HTML tags <[^>]+> become a space; URLs
// (https?://\S+, or a token starting with www.) become "!url"; @\w+ becomes
// "!user"; #\w+ is extracted as a label and replaced by a space; white-space
// runs collapse to one space and the ends are trimmed.
CleanedPost clean_text(std::string_view text);

struct PreprocessResult {
  std::optional<CleanedPost> post;
  Rejection rejection = Rejection::kNoHashtag;  // meaningful when !post

  bool accepted() const { return post.has_value(); }
};

PreprocessResult preprocess(const RawPost& raw, std::string_view target_language = "en");

// One post with its gold hashtags as label indices (sorted, unique, nonempty).
struct LabeledExample {
  std::string text;
  std::vector<std::uint32_t> labels;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

// Hashtags retained after frequency filtering, indexed in byte order.
class LabelSet {
 public:
  LabelSet() = default;
  static LabelSet from_names(std::vector<std::string> names,
                             std::vector<std::size_t> counts = {});

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::optional<std::uint32_t> index_of(std::string_view name) const;

  // Maps hashtag strings to indices, dropping unknown ones.
  std::vector<std::uint32_t> map(std::span<const std::string> hashtags) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> counts_;
  std::map<std::string, std::uint32_t, std::less<>> index_;
};

inline constexpr std::size_t kDefaultMinHashtagCount = 500;
inline constexpr std::size_t kDefaultMaxHashtagCount = 19000;

// Keeps hashtags whose post count on `corpus` lies in [min_count, max_count].
// Throws ConfigError when nothing survives.
LabelSet filter_hashtags(std::span<const CleanedPost> corpus,
                         std::size_t min_count = kDefaultMinHashtagCount,
                         std::size_t max_count = kDefaultMaxHashtagCount);

// Posts whose hashtags all fall outside `labels` are dropped and counted.
// Every distinct tag in `corpus`, unfiltered, with its post count.
LabelSet collect_labels(std::span<const CleanedPost> corpus);

std::vector<LabeledExample> apply_labels(std::span<const CleanedPost> posts,
                                         const LabelSet& labels, std::size_t* dropped = nullptr);

std::vector<std::string> texts_of(std::span<const LabeledExample> examples);
Alphabet build_alphabet(std::span<const LabeledExample> train);
inline constexpr std::size_t kDefaultVocabularySize = 20000;
WordVocab build_word_vocab(std::span<const LabeledExample> train,
                           std::size_t limit = kDefaultVocabularySize);

struct DatasetSplit {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> validation;
  std::vector<LabeledExample> test;
  LabelSet labels;
  std::size_t dropped_validation = 0;
  std::size_t dropped_test = 0;
  std::size_t dropped_train = 0;
};

struct SplitConfig {
  std::size_t validation_size = 10000;
  std::size_t test_size = 50000;
  std::size_t min_count = kDefaultMinHashtagCount;
  std::size_t max_count = kDefaultMaxHashtagCount;
  std::uint64_t seed = 1;
};

// Seeded shuffle, then validation, test and training portions in that order.
// Hashtag counts come from the training portion only.
DatasetSplit split_dataset(std::vector<CleanedPost> posts, const SplitConfig& config);

// Example positions in the test split with the most (rare) and fewest
// (frequent) out-of-vocabulary tokens. Ties go to the earlier example; the
// frequent set is chosen among examples not already in the rare set.
struct OovTestSets {
  std::vector<std::size_t> rare;
  std::vector<std::size_t> frequent;
};

OovTestSets select_oov_testsets(std::span<const LabeledExample> test, const WordVocab& vocab,
                                std::size_t k = 2000);

struct Batch {
  PaddedBatch inputs;
  Matrix targets;                        // batch x L multi-hot
  std::vector<std::size_t> example_ids;  // positions in the source split
};

Matrix multi_hot(std::span<const std::vector<std::uint32_t>> label_sets, std::size_t labels);

// Mini-batches covering every example once. When `shuffle` is given the order
// is a Fisher-Yates permutation drawn from it; otherwise the split order.
std::vector<Batch> make_batches(std::span<const LabeledExample> split, const SymbolTable& table,
                                std::size_t labels, std::size_t batch_size,
                                SeededRng* shuffle = nullptr);

// Raw input: "language<TAB>retweet(0/1)<TAB>text" per line, or text only.
enum class RawFormat { kTabSeparated, kPlainText };
std::vector<RawPost> read_raw_posts(std::istream& in, RawFormat format);

// Dataset files: "tag1,tag2<TAB>clean text" per line.
void write_dataset(std::ostream& out, std::span<const LabeledExample> examples,
                   const LabelSet& labels);
std::vector<CleanedPost> read_dataset(std::istream& in);

}  // namespace t2v

#endif  // T2V_DATA_HPP_
