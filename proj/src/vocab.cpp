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

#include "t2v/vocab.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "t2v/tensor.hpp"
#include "t2v/text.hpp"

namespace t2v {

Alphabet Alphabet::build(std::span<const std::string> texts) {
  Alphabet a;
  for (const auto& t : texts) {
    for (char32_t c : text::decode_utf8(t)) {
      if (!a.index_.contains(c)) {
        a.index_.emplace(c, static_cast<std::uint32_t>(a.characters_.size() + kReservedSymbols));
        a.characters_.push_back(c);
      }
    }
  }
  return a;
}

Alphabet Alphabet::from_characters(std::vector<char32_t> characters) {
  Alphabet a;
  for (char32_t c : characters) {
    if (!a.index_.emplace(c, static_cast<std::uint32_t>(a.index_.size() + kReservedSymbols))
             .second) {
      throw std::invalid_argument("alphabet: duplicate character U+" +
                                  std::to_string(static_cast<std::uint32_t>(c)));
    }
  }
  a.characters_ = std::move(characters);
  return a;
}

std::uint32_t Alphabet::index_of(char32_t c) const {
  auto it = index_.find(c);
  return it == index_.end() ? kUnkIndex : it->second;
}

char32_t Alphabet::character(std::uint32_t index) const {
  if (index < kReservedSymbols || index >= size()) {
    throw IndexError("alphabet: no character at index " + std::to_string(index));
  }
  return characters_[index - kReservedSymbols];
}

EncodedSequence Alphabet::encode(std::string_view text) const {
  EncodedSequence seq;
  for (char32_t c : text::decode_utf8(text)) seq.indices.push_back(index_of(c));
  return seq;
}

WordVocab WordVocab::build(std::span<const std::string> texts, std::size_t limit) {
  std::map<std::string, std::size_t> counts;
  for (const auto& t : texts)
    for (auto& tok : text::split_whitespace(t)) ++counts[std::move(tok)];

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // std::map iteration is already lexicographic, so a stable sort on count
  // alone keeps ties in byte order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  WordVocab v;
  v.limit_exceeded_ = limit > ranked.size();
  const std::size_t keep = std::min(limit, ranked.size());
  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) words.push_back(std::move(ranked[i].first));
  const bool exceeded = v.limit_exceeded_;
  v = from_words(std::move(words));
  v.limit_exceeded_ = exceeded;
  return v;
}

WordVocab WordVocab::from_words(std::vector<std::string> words) {
  WordVocab v;
  for (const auto& w : words) {
    if (!v.index_.emplace(w, static_cast<std::uint32_t>(v.index_.size() + kReservedSymbols))
             .second) {
      throw std::invalid_argument("word vocabulary: duplicate word '" + w + "'");
    }
  }
  v.words_ = std::move(words);
  return v;
}

std::uint32_t WordVocab::index_of(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkIndex : it->second;
}

bool WordVocab::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

const std::string& WordVocab::word(std::uint32_t index) const {
  if (index < kReservedSymbols || index >= size()) {
    throw IndexError("word vocabulary: no word at index " + std::to_string(index));
  }
  return words_[index - kReservedSymbols];
}

EncodedSequence WordVocab::encode(std::string_view text) const {
  EncodedSequence seq;
  for (const auto& tok : text::split_whitespace(text)) seq.indices.push_back(index_of(tok));
  return seq;
}

std::size_t WordVocab::count_oov(std::string_view text) const {
  std::size_t n = 0;
  for (const auto& tok : text::split_whitespace(text))
    if (!contains(tok)) ++n;
  return n;
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::kCharacter ? "character" : "word";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "character" || s == "char") return ModelKind::kCharacter;
  if (s == "word") return ModelKind::kWord;
  throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

std::size_t SymbolTable::size() const {
  return std::visit([](const auto& t) { return t.size(); }, table_);
}

EncodedSequence SymbolTable::encode(std::string_view text) const {
  return std::visit([&](const auto& t) { return t.encode(text); }, table_);
}

std::vector<std::string> SymbolTable::symbol_strings() const {
  if (const auto* a = alphabet()) {
    std::vector<std::string> out;
    out.reserve(a->characters().size());
    for (char32_t c : a->characters()) out.push_back(text::encode_utf8(c));
    return out;
  }
  return word_vocab()->words();
}

SymbolTable SymbolTable::from_symbol_strings(ModelKind kind, std::vector<std::string> symbols) {
  if (kind == ModelKind::kWord) return SymbolTable(WordVocab::from_words(std::move(symbols)));
  std::vector<char32_t> chars;
  chars.reserve(symbols.size());
  for (const auto& s : symbols) {
    const auto decoded = text::decode_utf8(s);
    if (decoded.size() != 1) {
      throw std::invalid_argument("alphabet symbol '" + s + "' is not a single character");
    }
    chars.push_back(decoded.front());
  }
  return SymbolTable(Alphabet::from_characters(std::move(chars)));
}

}  // namespace t2v
