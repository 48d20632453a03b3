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

#include "t2v/data.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "t2v/text.hpp"

namespace t2v {

namespace {

using text::is_space;
using text::is_word_char;

bool starts_with_at(const std::u32string& s, std::size_t pos, std::u32string_view prefix) {
  return s.compare(pos, prefix.size(), prefix) == 0;
}

std::u32string strip_html(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == U'<') {
      const std::size_t close = s.find(U'>', i + 1);
      if (close != std::u32string::npos && close > i + 1) {
        out.push_back(U' ');
        i = close + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::u32string replace_urls(const std::u32string& s) {
  const std::u32string url_token = text::decode_utf8(kUrlToken);
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t prefix = 0;
    if (starts_with_at(s, i, U"https://")) {
      prefix = 8;
    } else if (starts_with_at(s, i, U"http://")) {
      prefix = 7;
    } else if (starts_with_at(s, i, U"www.") && (i == 0 || is_space(s[i - 1]))) {
      prefix = 4;
    }
    if (prefix > 0 && i + prefix < s.size() && !is_space(s[i + prefix])) {
      std::size_t end = i + prefix;
      while (end < s.size() && !is_space(s[end])) ++end;
      out += url_token;
      i = end;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

// Rewrites every `sigil` followed by one or more word characters; `on_match`
// receives the word and returns the replacement.
template <typename F>
std::u32string rewrite_sigil_words(const std::u32string& s, char32_t sigil, F&& on_match) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == sigil && i + 1 < s.size() && is_word_char(s[i + 1])) {
      std::size_t end = i + 1;
      while (end < s.size() && is_word_char(s[end])) ++end;
      out += on_match(s.substr(i + 1, end - i - 1));
      i = end;
      continue;
    }
    out.push_back(s[i++]);
  }
  return out;
}

std::u32string collapse_whitespace(const std::u32string& s) {
  std::u32string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char32_t c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(U' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

std::string trim_ascii(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::string_view to_string(Rejection r) {
  switch (r) {
    case Rejection::kRetweet:
      return "retweet";
    case Rejection::kLanguage:
      return "non-target-language";
    case Rejection::kNoHashtag:
      return "no-hashtag";
    case Rejection::kEmptyAfterClean:
      return "empty-after-clean";
  }
  return "unknown";
}

std::size_t RejectionCounts::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

CleanedPost clean_text(std::string_view raw) {
  std::u32string s = text::to_lower(text::decode_utf8(raw));
  s = strip_html(s);
  s = replace_urls(s);
  const std::u32string user = text::decode_utf8(kUserToken);
  s = rewrite_sigil_words(s, U'@', [&](const std::u32string&) { return user; });

  CleanedPost post;
  std::set<std::string> seen;
  s = rewrite_sigil_words(s, U'#', [&](const std::u32string& word) {
    std::string tag = text::encode_utf8(word);
    if (seen.insert(tag).second) post.hashtags.push_back(std::move(tag));
    return std::u32string(U" ");
  });
  post.text = text::encode_utf8(collapse_whitespace(s));
  return post;
}

PreprocessResult preprocess(const RawPost& raw, std::string_view target_language) {
  PreprocessResult r;
  bool retweet = false;
  if (raw.is_retweet.has_value()) {
    retweet = *raw.is_retweet;
  } else {
    const std::u32string lowered = text::to_lower(text::decode_utf8(raw.text));
    std::size_t i = 0;
    while (i < lowered.size() && is_space(lowered[i])) ++i;
    retweet = lowered.compare(i, 4, U"rt @") == 0;
  }
  if (retweet) {
    r.rejection = Rejection::kRetweet;
    return r;
  }
  if (!raw.language_tag.empty() && raw.language_tag != target_language) {
    r.rejection = Rejection::kLanguage;
    return r;
  }
  CleanedPost post = clean_text(raw.text);
  if (post.hashtags.empty()) {
    r.rejection = Rejection::kNoHashtag;
    return r;
  }
  if (post.text.empty()) {
    r.rejection = Rejection::kEmptyAfterClean;
    return r;
  }
  r.post = std::move(post);
  return r;
}

LabelSet LabelSet::from_names(std::vector<std::string> names, std::vector<std::size_t> counts) {
  if (!counts.empty() && counts.size() != names.size()) {
    throw std::invalid_argument("label counts do not match label names");
  }
  LabelSet set;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!set.index_.emplace(names[i], static_cast<std::uint32_t>(i)).second) {
      throw std::invalid_argument("duplicate label '" + names[i] + "'");
    }
  }
  set.names_ = std::move(names);
  set.counts_ = counts.empty() ? std::vector<std::size_t>(set.names_.size(), 0) : std::move(counts);
  return set;
}

std::optional<std::uint32_t> LabelSet::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> LabelSet::map(std::span<const std::string> hashtags) const {
  std::vector<std::uint32_t> out;
  for (const auto& h : hashtags)
    if (auto idx = index_of(h)) out.push_back(*idx);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

LabelSet filter_hashtags(std::span<const CleanedPost> corpus, std::size_t min_count,
                         std::size_t max_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& post : corpus) {
    // A post counts once per distinct tag.
    std::set<std::string_view> distinct(post.hashtags.begin(), post.hashtags.end());
    for (auto tag : distinct) ++counts[std::string(tag)];
  }
  std::vector<std::string> names;
  std::vector<std::size_t> kept;
  for (const auto& [tag, n] : counts) {
    if (n >= min_count && n <= max_count) {
      names.push_back(tag);
      kept.push_back(n);
    }
  }
  if (names.empty()) {
    throw ConfigError("no hashtag has a post count in [" + std::to_string(min_count) + ", " +
                      std::to_string(max_count) + "]");
  }
  return LabelSet::from_names(std::move(names), std::move(kept));
}

LabelSet collect_labels(std::span<const CleanedPost> corpus) {
  return filter_hashtags(corpus, 1, std::numeric_limits<std::size_t>::max());
}

std::vector<LabeledExample> apply_labels(std::span<const CleanedPost> posts,
                                         const LabelSet& labels, std::size_t* dropped) {
  std::vector<LabeledExample> out;
  std::size_t n_dropped = 0;
  for (const auto& p : posts) {
    auto idx = labels.map(p.hashtags);
    if (idx.empty() || p.text.empty()) {
      ++n_dropped;
      continue;
    }
    out.push_back({p.text, std::move(idx)});
  }
  if (dropped != nullptr) *dropped = n_dropped;
  return out;
}

std::vector<std::string> texts_of(std::span<const LabeledExample> examples) {
  std::vector<std::string> texts;
  texts.reserve(examples.size());
  for (const auto& e : examples) texts.push_back(e.text);
  return texts;
}

Alphabet build_alphabet(std::span<const LabeledExample> train) {
  const auto texts = texts_of(train);
  return Alphabet::build(texts);
}

WordVocab build_word_vocab(std::span<const LabeledExample> train, std::size_t limit) {
  const auto texts = texts_of(train);
  return WordVocab::build(texts, limit);
}

DatasetSplit split_dataset(std::vector<CleanedPost> posts, const SplitConfig& config) {
  const std::size_t held_out = config.validation_size + config.test_size;
  if (posts.size() <= held_out) {
    throw DataError("corpus of " + std::to_string(posts.size()) +
                    " posts cannot supply validation " + std::to_string(config.validation_size) +
                    " + test " + std::to_string(config.test_size) + " and a training portion");
  }
  SeededRng rng(config.seed);
  for (std::size_t i = posts.size(); i > 1; --i) {
    std::swap(posts[i - 1], posts[rng.below(i)]);
  }
  std::span<const CleanedPost> validation(posts.data(), config.validation_size);
  std::span<const CleanedPost> test(posts.data() + config.validation_size, config.test_size);
  std::span<const CleanedPost> train(posts.data() + held_out, posts.size() - held_out);

  DatasetSplit split;
  split.labels = filter_hashtags(train, config.min_count, config.max_count);
  split.train = apply_labels(train, split.labels, &split.dropped_train);
  split.validation = apply_labels(validation, split.labels, &split.dropped_validation);
  split.test = apply_labels(test, split.labels, &split.dropped_test);
  return split;
}

OovTestSets select_oov_testsets(std::span<const LabeledExample> test, const WordVocab& vocab,
                                std::size_t k) {
  if (test.size() < 2 * k) {
    throw DataError("test split of " + std::to_string(test.size()) +
                    " examples is smaller than 2k = " + std::to_string(2 * k));
  }
  std::vector<std::size_t> oov(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) oov[i] = vocab.count_oov(test[i].text);

  std::vector<std::size_t> order(test.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return oov[a] > oov[b]; });
  OovTestSets sets;
  sets.rare.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));

  std::vector<bool> taken(test.size(), false);
  for (std::size_t i : sets.rare) taken[i] = true;
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return oov[a] < oov[b]; });
  for (std::size_t i : order) {
    if (sets.frequent.size() == k) break;
    if (!taken[i]) sets.frequent.push_back(i);
  }
  return sets;
}

Matrix multi_hot(std::span<const std::vector<std::uint32_t>> label_sets, std::size_t labels) {
  Matrix t(label_sets.size(), labels);
  for (std::size_t i = 0; i < label_sets.size(); ++i) {
    if (label_sets[i].empty()) {
      throw std::logic_error("example " + std::to_string(i) + " has no labels");
    }
    for (std::uint32_t l : label_sets[i]) {
      if (l >= labels) {
        throw ConfigError("label index " + std::to_string(l) + " outside label set of size " +
                          std::to_string(labels));
      }
      t(i, l) = 1.0;
    }
  }
  return t;
}

std::vector<Batch> make_batches(std::span<const LabeledExample> split, const SymbolTable& table,
                                std::size_t labels, std::size_t batch_size,
                                SeededRng* shuffle) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::vector<std::size_t> order(split.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle != nullptr) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[shuffle->below(i)]);
    }
  }
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    std::vector<EncodedSequence> seqs;
    std::vector<std::vector<std::uint32_t>> gold;
    Batch b;
    for (std::size_t k = start; k < end; ++k) {
      const LabeledExample& ex = split[order[k]];
      seqs.push_back(table.encode(ex.text));
      if (seqs.back().length() == 0) {
        throw DataError("example " + std::to_string(order[k]) + " has no symbols");
      }
      gold.push_back(ex.labels);
      b.example_ids.push_back(order[k]);
    }
    b.inputs = PaddedBatch::from_sequences(seqs);
    b.targets = multi_hot(gold, labels);
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<RawPost> read_raw_posts(std::istream& in, RawFormat format) {
  std::vector<RawPost> posts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (format == RawFormat::kPlainText) {
      if (trim_ascii(line).empty()) continue;
      posts.push_back({line, std::nullopt, ""});
      continue;
    }
    if (line.empty()) continue;
    const std::size_t first = line.find('\t');
    const std::size_t second =
        first == std::string::npos ? std::string::npos : line.find('\t', first + 1);
    if (second == std::string::npos) {
      throw DataError("expected language<TAB>retweet<TAB>text", line_no);
    }
    const std::string flag = line.substr(first + 1, second - first - 1);
    if (flag != "0" && flag != "1") {
      throw DataError("retweet flag must be 0 or 1, got '" + flag + "'", line_no);
    }
    posts.push_back({line.substr(second + 1), flag == "1", line.substr(0, first)});
  }
  return posts;
}

void write_dataset(std::ostream& out, std::span<const LabeledExample> examples,
                   const LabelSet& labels) {
  for (const auto& ex : examples) {
    for (std::size_t k = 0; k < ex.labels.size(); ++k) {
      if (k > 0) out << ',';
      out << labels.names().at(ex.labels[k]);
    }
    out << '\t' << ex.text << '\n';
  }
}

std::vector<CleanedPost> read_dataset(std::istream& in) {
  std::vector<CleanedPost> posts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw DataError("expected labels<TAB>text", line_no);
    CleanedPost post;
    post.text = line.substr(tab + 1);
    for (auto& tag : split(std::string_view(line).substr(0, tab), ',')) {
      if (tag.empty()) throw DataError("empty hashtag in label field", line_no);
      post.hashtags.push_back(std::move(tag));
    }
    if (post.text.empty()) throw DataError("empty text", line_no);
    posts.push_back(std::move(post));
  }
  return posts;
}

}  // namespace t2v
