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

#ifndef T2V_VOCAB_HPP_
#define T2V_VOCAB_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace t2v {

inline constexpr std::uint32_t kPadIndex = 0;
inline constexpr std::uint32_t kUnkIndex = 1;
inline constexpr std::uint32_t kReservedSymbols = 2;

// A symbol stream fed to the encoder. Never empty.
struct EncodedSequence {
  std::vector<std::uint32_t> indices;

  std::size_t length() const { return indices.size(); }
};

// Character inventory of the training corpus. Index order is first occurrence
// in corpus order; PAD and UNK occupy the first two slots.
class Alphabet {
 public:
  Alphabet() = default;

  static Alphabet build(std::span<const std::string> texts);
  // Rebuilds from the non-reserved characters in index order.
  static Alphabet from_characters(std::vector<char32_t> characters);

  std::size_t size() const { return characters_.size() + kReservedSymbols; }
  std::uint32_t index_of(char32_t c) const;
  bool contains(char32_t c) const { return index_.contains(c); }
  // Character for a non-reserved index.
  char32_t character(std::uint32_t index) const;
  const std::vector<char32_t>& characters() const { return characters_; }

  EncodedSequence encode(std::string_view text) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.characters_ == b.characters_;
  }

 private:
  std::vector<char32_t> characters_;
  std::unordered_map<char32_t, std::uint32_t> index_;
};

// The `limit` most frequent white-space delimited tokens; frequency ties are
// broken lexicographically (byte order). Everything else maps to UNK.
class WordVocab {
 public:
  WordVocab() = default;

  static WordVocab build(std::span<const std::string> texts, std::size_t limit);
  static WordVocab from_words(std::vector<std::string> words);

  std::size_t size() const { return words_.size() + kReservedSymbols; }
  std::size_t word_count() const { return words_.size(); }
  std::uint32_t index_of(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& word(std::uint32_t index) const;
  const std::vector<std::string>& words() const { return words_; }
  // True when the build asked for more words than the corpus has.
  bool limit_exceeded_distinct() const { return limit_exceeded_; }

  EncodedSequence encode(std::string_view text) const;
  // Number of tokens in `text` that are not in the vocabulary.
  std::size_t count_oov(std::string_view text) const;

  friend bool operator==(const WordVocab& a, const WordVocab& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> index_;
  bool limit_exceeded_ = false;
};

enum class ModelKind { kCharacter, kWord };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view s);

// Input front-end of a model: either characters or words.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(Alphabet alphabet) : table_(std::move(alphabet)) {}
  explicit SymbolTable(WordVocab vocab) : table_(std::move(vocab)) {}

  ModelKind kind() const {
    return std::holds_alternative<Alphabet>(table_) ? ModelKind::kCharacter : ModelKind::kWord;
  }
  std::size_t size() const;
  // Empty sequence when the text has no symbols.
  EncodedSequence encode(std::string_view text) const;

  // UTF-8 spelling of every non-reserved symbol, in index order.
  std::vector<std::string> symbol_strings() const;
  static SymbolTable from_symbol_strings(ModelKind kind, std::vector<std::string> symbols);

  const Alphabet* alphabet() const { return std::get_if<Alphabet>(&table_); }
  const WordVocab* word_vocab() const { return std::get_if<WordVocab>(&table_); }

  friend bool operator==(const SymbolTable&, const SymbolTable&) = default;

 private:
  std::variant<Alphabet, WordVocab> table_;
};

}  // namespace t2v

#endif  // T2V_VOCAB_HPP_
