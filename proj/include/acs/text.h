// Copyright 2026 The ACS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// UTF-8 helpers backed by ICU character properties. All lengths and offsets
// that leave this module are counted in unicode scalar values unless the
// function name says "byte".

#ifndef ACS_TEXT_H_
#define ACS_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace acs::text {

// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string Decode(std::string_view utf8);
std::string Encode(std::u32string_view cps);
void AppendCodePoint(char32_t cp, std::string* out);

// Number of unicode scalar values.
std::size_t Length(std::string_view utf8);

// Simple (per code point) case folding, used for every lexicon lookup.
std::string FoldCase(std::string_view utf8);

enum class CharClass {
  kLetter,
  kDigit,
  kHan,       // U+4E00..U+9FFF
  kEmoji,     // pictographs plus joiners/modifiers that glue them together
  kSpace,
  kPunct,
  kOther,
};

CharClass Classify(char32_t cp);
bool IsHan(char32_t cp);
bool IsLetter(char32_t cp);
bool IsUpper(char32_t cp);
bool IsSpace(char32_t cp);

// True for apostrophes and hyphens, which may sit inside a word.
bool IsWordInternalMark(char32_t cp);

// A "word": at least one letter and nothing but letters, combining marks and
// word-internal marks. Han characters count as letters.
bool IsAlphabeticWord(std::string_view token);

// First code point is uppercase. All-caps tokens qualify.
bool StartsUpper(std::string_view token);

// Uppercases the first code point only.
std::string CapitalizeFirst(std::string_view token);

bool IsAllHan(std::string_view token);
bool IsAllLatinLetters(std::string_view token);

std::string Trim(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);

// Byte offset of the n-th code point (n may equal Length()).
std::size_t ByteOffsetOfCodePoint(std::string_view utf8, std::size_t n);
std::size_t CodePointOffsetOfByte(std::string_view utf8, std::size_t byte);

}  // namespace acs::text

#endif  // ACS_TEXT_H_
