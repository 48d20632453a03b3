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

#ifndef T2V_TEXT_HPP_
#define T2V_TEXT_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace t2v::text {

// Decodes UTF-8; malformed bytes decode to U+FFFD one byte at a time.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
std::string encode_utf8(char32_t cp);

// Unicode \w: alphabetic, marks, decimal digits, connector punctuation, join controls.
bool is_word_char(char32_t cp);
bool is_space(char32_t cp);
// Per-code-point simple lower-case mapping.
std::u32string to_lower(std::u32string_view s);

// Splits on runs of Unicode white space; no empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

}  // namespace t2v::text

#endif  // T2V_TEXT_HPP_
