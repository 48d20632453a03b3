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

#include <set>
#include <sstream>

#include "doctest.h"
#include "t2v/data.hpp"
#include "t2v/text.hpp"
#include "t2v/vocab.hpp"

namespace t2v {
namespace {

std::vector<LabeledExample> examples(std::initializer_list<const char*> texts) {
  std::vector<LabeledExample> out;
  for (const char* t : texts) out.push_back({t, {0}});
  return out;
}

TEST_CASE("utf8 round trip and malformed input") {
  const std::string s = "a\xC3\xA9\xE2\x82\xAC\xF0\x9F\x98\x80";  // a é € 😀
  const auto cps = text::decode_utf8(s);
  REQUIRE(cps.size() == 4);
  CHECK(cps[3] == U'\U0001F600');
  CHECK(text::encode_utf8(cps) == s);
  CHECK(text::decode_utf8("\xFF" "a") == U"�a");
  CHECK(text::decode_utf8("\xE2\x82") == U"��");
}

TEST_CASE("preprocess: mixed post") {
  const auto r = preprocess({"Check this #Cool http://x.co @bob", false, "en"});
  REQUIRE(r.accepted());
  CHECK(r.post->text == "check this !url !user");
  CHECK(r.post->hashtags == std::vector<std::string>{"cool"});
}

TEST_CASE("preprocess: leading hashtags") {
  const auto r = preprocess({"#a #b hello", false, "en"});
  REQUIRE(r.accepted());
  CHECK(r.post->text == "hello");
  CHECK(r.post->hashtags == std::vector<std::string>{"a", "b"});
}

TEST_CASE("preprocess rejections") {
  CHECK(preprocess({"no tags here", false, "en"}).rejection == Rejection::kNoHashtag);
  CHECK(preprocess({"#only #tags", false, "en"}).rejection == Rejection::kEmptyAfterClean);
  CHECK(preprocess({"hola #x", false, "es"}).rejection == Rejection::kLanguage);
  CHECK(preprocess({"copied #x", true, "en"}).rejection == Rejection::kRetweet);
  CHECK(preprocess({"RT @someone: copied #x", std::nullopt, ""}).rejection ==
        Rejection::kRetweet);
  CHECK(preprocess({"art @gallery #x", std::nullopt, ""}).accepted());
  RejectionCounts counts;
  counts.add(Rejection::kRetweet);
  counts.add(Rejection::kRetweet);
  counts.add(Rejection::kLanguage);
  CHECK(counts[Rejection::kRetweet] == 2);
  CHECK(counts.total() == 3);
}

TEST_CASE("clean_text rules") {
  CHECK(clean_text("Hello <b>World</b>!").text == "hello world !");
  CHECK(clean_text("a<>b").text == "a<>b");
  CHECK(clean_text("see www.example.com now").text == "see !url now");
  CHECK(clean_text("awww.cute").text == "awww.cute");
  CHECK(clean_text("mail me@host.com").text == "mail me!user.com");
  CHECK(clean_text("link https://t.co/#frag").hashtags.empty());
  CHECK(clean_text("tabs\t\tand\n newlines").text == "tabs and newlines");
  CHECK(clean_text("#Été au #soleil").hashtags == std::vector<std::string>{"été", "soleil"});
  CHECK(clean_text("#dup #DUP").hashtags == std::vector<std::string>{"dup"});
  CHECK(clean_text("ÉCOLE").text == "école");
  CHECK(clean_text("sun \xF0\x9F\x98\x80#summer").hashtags == std::vector<std::string>{"summer"});
}

TEST_CASE("clean_text is idempotent") {
  for (const char* raw :
       {"Check this #Cool http://x.co @bob", "ht#xtp://a b", "<i>x</i>#t www.a.b @c_d!",
        "\xF0\x9F\x98\x80 so   good #yum", "a#b#c @d#e", "rt@x # @ < >"}) {
    const CleanedPost once = clean_text(raw);
    const CleanedPost twice = clean_text(once.text);
    CHECK(twice.text == once.text);
    CHECK(twice.hashtags.empty());
  }
}

TEST_CASE("filter_hashtags thresholds are inclusive") {
  std::vector<CleanedPost> corpus;
  auto add = [&](const std::string& tag, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) corpus.push_back({"t", {tag}});
  };
  add("under", 499);
  add("edge", 500);
  add("over", 20000);
  add("top", 19000);
  const LabelSet set = filter_hashtags(corpus);
  CHECK(set.names() == std::vector<std::string>{"edge", "top"});
  CHECK(set.counts() == std::vector<std::size_t>{500, 19000});

  const LabelSet all = filter_hashtags(corpus, 1, std::numeric_limits<std::size_t>::max());
  CHECK(all.size() == 4);
  CHECK_THROWS_AS(filter_hashtags(corpus, 30000, 40000), ConfigError);
}

TEST_CASE("apply_labels drops posts left without labels") {
  const std::vector<CleanedPost> posts{{"a", {"x", "y"}}, {"b", {"z"}}, {"c", {"y"}}};
  const LabelSet set = LabelSet::from_names({"x", "y"});
  std::size_t dropped = 0;
  const auto ex = apply_labels(posts, set, &dropped);
  CHECK(dropped == 1);
  REQUIRE(ex.size() == 2);
  CHECK(ex[0].labels == std::vector<std::uint32_t>{0, 1});
  CHECK(ex[1].labels == std::vector<std::uint32_t>{1});
}

TEST_CASE("build_alphabet") {
  const auto train = examples({"ab", "bc"});
  const Alphabet a = build_alphabet(train);
  CHECK(a.size() == 5);
  CHECK(a.index_of(U'a') == 2);
  CHECK(a.index_of(U'c') == 4);
  CHECK(a.index_of(U'z') == kUnkIndex);
  CHECK(build_alphabet(train) == a);

  const auto fancy = examples({"hi \xF0\x9F\x98\x80 \xE2\x9D\xA4"});
  const Alphabet b = build_alphabet(fancy);
  CHECK(b.size() == 2 + 5);
  CHECK(b.index_of(U' ') == 4);
  CHECK(b.index_of(U'\U0001F600') >= kReservedSymbols);
  const EncodedSequence s = b.encode("hi \xF0\x9F\x98\x8E");
  CHECK(s.indices.back() == kUnkIndex);
}

TEST_CASE("build_word_vocab") {
  const auto corpus = examples({"a a b"});
  const WordVocab v = build_word_vocab(corpus, 1);
  CHECK(v.words() == std::vector<std::string>{"a"});
  CHECK(v.index_of("b") == kUnkIndex);
  CHECK(v.size() == 3);

  const auto tie = examples({"pear apple fig fig"});
  CHECK(build_word_vocab(tie, 2).words() == std::vector<std::string>{"fig", "apple"});
  CHECK(build_word_vocab(tie, 2) == build_word_vocab(tie, 2));

  const WordVocab all = build_word_vocab(tie, 10);
  CHECK(all.limit_exceeded_distinct());
  CHECK(all.word_count() == 3);
  CHECK(all.count_oov("fig kiwi pear plum") == 2);
}

TEST_CASE("select_oov_testsets") {
  const WordVocab vocab = WordVocab::from_words({"in"});
  const auto toy = examples({"in in", "x y in", "a b c d e"});
  const OovTestSets s = select_oov_testsets(toy, vocab, 1);
  CHECK(s.rare == std::vector<std::size_t>{2});
  CHECK(s.frequent == std::vector<std::size_t>{0});
  CHECK_THROWS_AS(select_oov_testsets(toy, vocab, 2), DataError);

  // Equal counts: rare takes the first examples, frequent the next ones.
  const auto flat = examples({"q", "r", "s", "t"});
  const OovTestSets f = select_oov_testsets(flat, vocab, 2);
  CHECK(f.rare == std::vector<std::size_t>{0, 1});
  CHECK(f.frequent == std::vector<std::size_t>{2, 3});
}

TEST_CASE("select_oov_testsets disjoint on random toy splits with distinct counts") {
  SeededRng rng(8);
  const WordVocab vocab = WordVocab::from_words({"w"});
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i) counts[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(counts[i - 1], counts[rng.below(i)]);
    std::vector<LabeledExample> split;
    for (std::size_t c : counts) {
      std::string t = "w";
      for (std::size_t k = 0; k < c; ++k) t += " o" + std::to_string(k);
      split.push_back({t, {0}});
    }
    const std::size_t k = 1 + rng.below(n / 2);
    const OovTestSets s = select_oov_testsets(split, vocab, k);
    std::set<std::size_t> rare(s.rare.begin(), s.rare.end());
    for (std::size_t i : s.frequent) CHECK_FALSE(rare.contains(i));
    // Enumeration: rare are exactly the k largest counts, frequent the k smallest.
    for (std::size_t i : s.rare) CHECK(counts[i] >= n - k);
    for (std::size_t i : s.frequent) CHECK(counts[i] < k);
  }
}

TEST_CASE("make_batches") {
  const SymbolTable table(Alphabet::build(std::vector<std::string>{"abcde"}));
  std::vector<LabeledExample> split{{"abc", {0}}, {"abcde", {1, 2}}};
  auto batches = make_batches(split, table, 3, 2);
  REQUIRE(batches.size() == 1);
  const Batch& b = batches[0];
  CHECK(b.inputs.max_length == 5);
  CHECK(b.inputs.mask.rows() == 2);
  CHECK(b.inputs.mask(0, 3) == 0.0);
  CHECK(b.inputs.mask(0, 4) == 0.0);
  CHECK(b.targets == Matrix::from_rows({{1, 0, 0}, {0, 1, 1}}));

  std::vector<LabeledExample> many;
  for (int i = 0; i < 23; ++i) many.push_back({std::string(1 + i % 4, 'a'), {0}});
  SeededRng r1(5), r2(5);
  const auto a = make_batches(many, table, 3, 4, &r1);
  const auto c = make_batches(many, table, 3, 4, &r2);
  CHECK(a.size() == 6);
  std::multiset<std::size_t> seen;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].example_ids == c[k].example_ids);
    seen.insert(a[k].example_ids.begin(), a[k].example_ids.end());
  }
  CHECK(seen.size() == 23);
  for (std::size_t i = 0; i < 23; ++i) CHECK(seen.count(i) == 1);

  std::vector<LabeledExample> unlabeled{{"abc", {}}};
  CHECK_THROWS_AS(make_batches(unlabeled, table, 3, 2), std::logic_error);
}

TEST_CASE("raw and dataset line formats") {
  std::istringstream raw("en\t0\tHello #x\nes\t1\tHola\n");
  const auto posts = read_raw_posts(raw, RawFormat::kTabSeparated);
  REQUIRE(posts.size() == 2);
  CHECK(posts[1].language_tag == "es");
  CHECK(*posts[1].is_retweet);

  std::istringstream bad("en\t0\tok\nbroken line\n");
  try {
    read_raw_posts(bad, RawFormat::kTabSeparated);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream flag("en\tyes\ttext\n");
  CHECK_THROWS_AS(read_raw_posts(flag, RawFormat::kTabSeparated), DataError);

  std::istringstream plain("just text #t\n\n  \nmore\n");
  const auto p = read_raw_posts(plain, RawFormat::kPlainText);
  CHECK(p.size() == 2);
  CHECK_FALSE(p[0].is_retweet.has_value());

  const LabelSet labels = LabelSet::from_names({"a", "b"});
  std::vector<LabeledExample> ex{{"some text", {0, 1}}, {"more", {1}}};
  std::ostringstream out;
  write_dataset(out, ex, labels);
  CHECK(out.str() == "a,b\tsome text\nb\tmore\n");
  std::istringstream in(out.str());
  const auto back = read_dataset(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == CleanedPost{"some text", {"a", "b"}});

  std::istringstream broken("a,b text without tab\n");
  CHECK_THROWS_AS(read_dataset(broken), DataError);
}

TEST_CASE("split_dataset uses training counts only") {
  std::vector<CleanedPost> posts;
  for (int i = 0; i < 40; ++i) posts.push_back({"post " + std::to_string(i), {i % 2 ? "odd" : "even"}});
  posts.push_back({"rare one", {"rare"}});
  SplitConfig cfg;
  cfg.validation_size = 5;
  cfg.test_size = 5;
  cfg.min_count = 3;
  cfg.max_count = 100;
  cfg.seed = 3;
  const DatasetSplit s = split_dataset(posts, cfg);
  CHECK(s.labels.names() == std::vector<std::string>{"even", "odd"});
  CHECK(s.train.size() + s.validation.size() + s.test.size() + s.dropped_train +
            s.dropped_validation + s.dropped_test ==
        posts.size());
  std::set<std::string> texts;
  for (const auto* part : {&s.train, &s.validation, &s.test})
    for (const auto& e : *part) CHECK(texts.insert(e.text).second);
  CHECK(split_dataset(posts, cfg).train == s.train);

  cfg.validation_size = 30;
  cfg.test_size = 20;
  CHECK_THROWS_AS(split_dataset(posts, cfg), DataError);
}

}  // namespace
}  // namespace t2v
