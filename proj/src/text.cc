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

#include "acs/text.h"

#include <algorithm>

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

namespace acs::text {

std::u32string Decode(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  const int32_t length = static_cast<int32_t>(utf8.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? U'�' : static_cast<char32_t>(c));
  }
  return out;
}

void AppendCodePoint(char32_t cp, std::string* out) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(cp), error);
  if (error) {
    out->append("\xEF\xBF\xBD");
    return;
  }
  out->append(reinterpret_cast<const char*>(buf), n);
}

std::string Encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) AppendCodePoint(cp, &out);
  return out;
}

std::size_t Length(std::string_view utf8) {
  std::size_t n = 0;
  for (unsigned char c : utf8) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string FoldCase(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (char32_t cp : Decode(utf8)) {
    AppendCodePoint(static_cast<char32_t>(u_foldCase(cp, U_FOLD_CASE_DEFAULT)),
                    &out);
  }
  return out;
}

bool IsHan(char32_t cp) { return cp >= 0x4E00 && cp <= 0x9FFF; }

bool IsLetter(char32_t cp) { return u_isalpha(static_cast<UChar32>(cp)); }

bool IsUpper(char32_t cp) { return u_isUUppercase(static_cast<UChar32>(cp)); }

bool IsSpace(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool IsWordInternalMark(char32_t cp) {
  return cp == U'\'' || cp == U'-' || cp == U'’' || cp == U'‐';
}

namespace {

bool IsEmojiComponent(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  return cp == 0x200D || cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3 ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF) ||
         (cp >= 0xE0020 && cp <= 0xE007F) ||
         u_hasBinaryProperty(c, UCHAR_REGIONAL_INDICATOR);
}

bool IsCombiningMark(char32_t cp) {
  const int8_t type = u_charType(static_cast<UChar32>(cp));
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

}  // namespace

CharClass Classify(char32_t cp) {
  const auto c = static_cast<UChar32>(cp);
  if (IsSpace(cp)) return CharClass::kSpace;
  if (IsHan(cp)) return CharClass::kHan;
  if (u_isalpha(c) || IsCombiningMark(cp)) return CharClass::kLetter;
  if (u_isdigit(c)) return CharClass::kDigit;
  // Extended_Pictographic also covers ASCII-range symbols like '#' only via
  // Emoji, which we avoid by testing the pictographic property.
  if (u_hasBinaryProperty(c, UCHAR_EXTENDED_PICTOGRAPHIC) ||
      IsEmojiComponent(cp)) {
    return CharClass::kEmoji;
  }
  if (u_ispunct(c)) return CharClass::kPunct;
  const int8_t type = u_charType(c);
  if (type == U_MATH_SYMBOL || type == U_CURRENCY_SYMBOL ||
      type == U_MODIFIER_SYMBOL || type == U_OTHER_SYMBOL) {
    return CharClass::kPunct;
  }
  return CharClass::kOther;
}

bool IsAlphabeticWord(std::string_view token) {
  bool has_letter = false;
  for (char32_t cp : Decode(token)) {
    if (IsLetter(cp) || IsHan(cp)) {
      has_letter = true;
    } else if (!IsCombiningMark(cp) && !IsWordInternalMark(cp)) {
      return false;
    }
  }
  return has_letter;
}

bool StartsUpper(std::string_view token) {
  const std::u32string cps = Decode(token);
  return !cps.empty() && IsUpper(cps.front());
}

std::string CapitalizeFirst(std::string_view token) {
  std::u32string cps = Decode(token);
  if (cps.empty()) return std::string();
  cps[0] = static_cast<char32_t>(u_totitle(static_cast<UChar32>(cps[0])));
  return Encode(cps);
}

bool IsAllHan(std::string_view token) {
  const std::u32string cps = Decode(token);
  if (cps.empty()) return false;
  for (char32_t cp : cps) {
    if (!IsHan(cp)) return false;
  }
  return true;
}

bool IsAllLatinLetters(std::string_view token) {
  const std::u32string cps = Decode(token);
  bool has_letter = false;
  for (char32_t cp : cps) {
    if (IsWordInternalMark(cp) || IsCombiningMark(cp)) continue;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode script =
        uscript_getScript(static_cast<UChar32>(cp), &status);
    if (U_FAILURE(status) || script != USCRIPT_LATIN || !IsLetter(cp)) {
      return false;
    }
    has_letter = true;
  }
  return has_letter;
}

std::string Trim(std::string_view s) {
  const std::u32string cps = Decode(s);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && IsSpace(cps[begin])) ++begin;
  while (end > begin && IsSpace(cps[end - 1])) --end;
  return Encode(std::u32string_view(cps).substr(begin, end - begin));
}

std::vector<std::string> SplitWhitespace(std::string_view s) {
  std::vector<std::string> out;
  std::u32string current;
  for (char32_t cp : Decode(s)) {
    if (IsSpace(cp)) {
      if (!current.empty()) out.push_back(Encode(current));
      current.clear();
    } else {
      current.push_back(cp);
    }
  }
  if (!current.empty()) out.push_back(Encode(current));
  return out;
}

std::size_t ByteOffsetOfCodePoint(std::string_view utf8, std::size_t n) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < utf8.size(); ++i) {
    if ((static_cast<unsigned char>(utf8[i]) & 0xC0) != 0x80) {
      if (seen == n) return i;
      ++seen;
    }
  }
  return utf8.size();
}

std::size_t CodePointOffsetOfByte(std::string_view utf8, std::size_t byte) {
  return Length(utf8.substr(0, std::min(byte, utf8.size())));
}

}  // namespace acs::text
