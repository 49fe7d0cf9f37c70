// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLICYSCOPE_UNICODE_H_
#define POLICYSCOPE_UNICODE_H_

#include <string>
#include <string_view>

namespace policyscope::unicode {

bool is_valid_utf8(std::string_view text);

// Decodes valid UTF-8. Callers validate first; invalid sequences decode to
// U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);

// Full Unicode lowercase mapping (root locale).
std::string to_lower(std::string_view text);

// Case- and diacritic-insensitive key: NFD, drop nonspacing marks, case
// fold. "MÉLENCHON" and "melenchon" fold to the same string.
std::string fold(std::string_view text);

bool is_letter(char32_t cp);
// Letter, digit or combining mark: a code point that continues a word.
bool is_word_char(char32_t cp);
bool is_space(char32_t cp);
// Combining mark (nonspacing or spacing).
bool is_mark(char32_t cp);

// Code points removed by emoji stripping: Misc Symbols (2600-26FF),
// Dingbats (2700-27BF), Misc Symbols and Pictographs (1F300-1F5FF),
// Emoticons (1F600-1F64F), Transport and Map (1F680-1F6FF), Supplemental
// Symbols and Pictographs (1F900-1F9FF), Symbols and Pictographs Ext-A
// (1FA70-1FAFF), regional indicators (1F1E6-1F1FF), variation selectors
// (FE00-FE0F) and the zero-width joiner (200D).
bool is_emoji(char32_t cp);

}  // namespace policyscope::unicode

#endif  // POLICYSCOPE_UNICODE_H_
