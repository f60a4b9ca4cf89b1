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

#include "acs/ingest.h"

#include <unicode/uchar.h>

#include <algorithm>
#include <sstream>

#include "acs/error.h"
#include "acs/text.h"

namespace acs::ingest {

namespace {

using text::Decode;
using text::Encode;

bool IsMentionChar(char32_t cp) {
  return cp == U'_' || u_isalnum(static_cast<UChar32>(cp));
}

bool IsOpeningMark(char32_t cp) {
  switch (cp) {
    case U'(': case U'[': case U'{': case U'"': case U'\'': case U'“':
    case U'‘': case U'«': case U'<':
      return true;
    default:
      return false;
  }
}

bool HasPrefixFolded(const std::u32string& s, std::size_t at,
                     std::u32string_view prefix) {
  if (at + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (u_tolower(static_cast<UChar32>(s[at + i])) !=
        static_cast<UChar32>(prefix[i])) {
      return false;
    }
  }
  return true;
}

bool UrlStartsAt(const std::u32string& s, std::size_t i) {
  if (i > 0 && !text::IsSpace(s[i - 1]) && !IsOpeningMark(s[i - 1])) {
    return false;
  }
  return HasPrefixFolded(s, i, U"http://") ||
         HasPrefixFolded(s, i, U"https://") || HasPrefixFolded(s, i, U"www.");
}

bool IsUrlTrailingPunct(char32_t cp) {
  switch (cp) {
    case U'.': case U',': case U';': case U':': case U'!': case U'?':
    case U')': case U']': case U'}': case U'"': case U'\'': case U'”':
    case U'’': case U'»': case U'>':
      return true;
    default:
      return false;
  }
}

// End (exclusive) of a mention starting at `i`, or i if none starts there.
std::size_t MentionEnd(const std::u32string& s, std::size_t i) {
  if (s[i] != U'@') return i;
  if (i > 0 && IsMentionChar(s[i - 1])) return i;
  std::size_t j = i + 1;
  while (j < s.size() && IsMentionChar(s[j])) ++j;
  return j > i + 1 ? j : i;
}

}  // namespace

RawDocument DocumentFromJson(const Json& j) {
  RawDocument doc;
  try {
    doc.id = j.at("id").get<std::string>();
    doc.text = j.at("text").get<std::string>();
    doc.lang_claim = j.value("lang_claim", "");
    const std::string domain = j.value("domain", "social");
    if (domain == "social") {
      doc.domain = Domain::kSocial;
    } else if (domain == "spoken") {
      doc.domain = Domain::kSpoken;
    } else {
      throw DataError("document " + doc.id + ": unknown domain '" + domain +
                      "'");
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed document record: ") + e.what());
  }
  if (doc.text.empty()) throw DataError("document " + doc.id + ": empty text");
  return doc;
}

Json ToJson(const RawDocument& doc) {
  return {{"id", doc.id},
          {"text", doc.text},
          {"lang_claim", doc.lang_claim},
          {"domain", doc.domain == Domain::kSocial ? "social" : "spoken"}};
}

SentenceRecord SentenceFromJson(const Json& j) {
  SentenceRecord s;
  try {
    s.doc_id = j.at("doc_id").get<std::string>();
    s.index = j.at("index").get<int>();
    s.text = j.at("text").get<std::string>();
    s.tokens = j.at("tokens").get<std::vector<std::string>>();
    s.byte_begin = j.value("byte_begin", std::size_t{0});
    s.byte_end = j.value("byte_end", s.text.size());
    s.lang_claim = j.value("lang_claim", "");
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed sentence record: ") + e.what());
  }
  if (s.index < 0) throw DataError("sentence " + s.Id() + ": negative index");
  return s;
}

Json ToJson(const SentenceRecord& s) {
  return {{"id", s.Id()},
          {"doc_id", s.doc_id},
          {"index", s.index},
          {"text", s.text},
          {"tokens", s.tokens},
          {"byte_begin", s.byte_begin},
          {"byte_end", s.byte_end},
          {"lang_claim", s.lang_claim}};
}

std::string Normalize(std::string_view raw_text) {
  const std::u32string in = Decode(raw_text);
  std::u32string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (UrlStartsAt(in, i)) {
      std::size_t j = i;
      while (j < in.size() && !text::IsSpace(in[j])) ++j;
      while (j > i && IsUrlTrailingPunct(in[j - 1])) --j;
      out += U"HTTPURL";
      i = j;
      continue;
    }
    std::size_t end = MentionEnd(in, i);
    if (end > i) {
      // Absorb further mentions separated from this one only by whitespace.
      for (;;) {
        std::size_t k = end;
        while (k < in.size() && text::IsSpace(in[k])) ++k;
        if (k == end || k >= in.size()) break;
        std::size_t next = MentionEnd(in, k);
        if (next == k) break;
        end = next;
      }
      out += U"@USER";
      i = end;
      continue;
    }
    out.push_back(in[i]);
    ++i;
  }
  return Encode(out);
}

WordSet WordSet::Load(const std::string& path) {
  std::istringstream in(ReadFile(path));
  WordSet set;
  std::string line;
  while (std::getline(in, line)) {
    std::string word = text::Trim(line);
    if (word.empty() || word[0] == '#') continue;
    set.Insert(word);
  }
  return set;
}

WordSet WordSet::FromWords(std::span<const std::string> words) {
  WordSet set;
  for (const auto& w : words) set.Insert(w);
  return set;
}

bool WordSet::Contains(std::string_view surface) const {
  return words_.count(text::FoldCase(surface)) > 0;
}

void WordSet::Insert(std::string_view surface) {
  words_.insert(text::FoldCase(surface));
}

void WordSet::Erase(std::string_view surface) {
  words_.erase(text::FoldCase(surface));
}

bool ObscenityGate(std::span<const std::string> tokens,
                   const WordSet& obscene_lexicon) {
  return std::none_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
    return obscene_lexicon.Contains(t);
  });
}

namespace {

bool IsWordChar(char32_t cp) {
  const auto cls = text::Classify(cp);
  return cls == text::CharClass::kLetter || cls == text::CharClass::kDigit ||
         cp == U'_';
}

class ChunkTokenizer {
 public:
  ChunkTokenizer(const TokenizerOptions& options,
                 std::vector<std::string>* out)
      : options_(options), out_(out) {}

  void Run(const std::u32string& chunk) {
    std::size_t i = 0;
    // Placeholders and hashtags are atomic; trailing punctuation splits off.
    for (std::u32string_view atom : {std::u32string_view(U"@USER"),
                                     std::u32string_view(U"HTTPURL")}) {
      if (chunk.compare(0, atom.size(), atom) == 0 &&
          (chunk.size() == atom.size() || !IsWordChar(chunk[atom.size()]))) {
        out_->push_back(Encode(atom));
        i = atom.size();
        break;
      }
    }
    if (i == 0 && chunk.size() > 1 && chunk[0] == U'#' && IsWordChar(chunk[1])) {
      std::size_t j = 1;
      while (j < chunk.size() && IsWordChar(chunk[j])) ++j;
      out_->push_back(Encode(std::u32string_view(chunk).substr(0, j)));
      i = j;
    }
    while (i < chunk.size()) {
      const char32_t cp = chunk[i];
      const auto cls = text::Classify(cp);
      if (IsWordChar(cp)) {
        std::size_t j = i + 1;
        while (j < chunk.size()) {
          if (IsWordChar(chunk[j])) {
            ++j;
          } else if (text::IsWordInternalMark(chunk[j]) &&
                     j + 1 < chunk.size() && IsWordChar(chunk[j + 1])) {
            j += 2;
          } else {
            break;
          }
        }
        Emit(chunk, i, j);
        i = j;
      } else if (cls == text::CharClass::kHan) {
        std::size_t j = i + 1;
        while (j < chunk.size() && text::IsHan(chunk[j])) ++j;
        EmitHan(std::u32string_view(chunk).substr(i, j - i));
        i = j;
      } else if (cls == text::CharClass::kEmoji) {
        std::size_t j = i + 1;
        while (j < chunk.size() &&
               text::Classify(chunk[j]) == text::CharClass::kEmoji) {
          ++j;
        }
        Emit(chunk, i, j);
        i = j;
      } else {
        // Repeated punctuation ("...", "!!!") stays one token.
        std::size_t j = i + 1;
        while (j < chunk.size() && chunk[j] == cp) ++j;
        Emit(chunk, i, j);
        i = j;
      }
    }
  }

 private:
  void Emit(const std::u32string& chunk, std::size_t b, std::size_t e) {
    out_->push_back(Encode(std::u32string_view(chunk).substr(b, e - b)));
  }

  void EmitHan(std::u32string_view run) {
    if (options_.han_tokenizer) {
      for (auto& w : options_.han_tokenizer(Encode(run))) {
        if (!w.empty()) out_->push_back(std::move(w));
      }
      return;
    }
    for (char32_t cp : run) out_->push_back(Encode(std::u32string(1, cp)));
  }

  const TokenizerOptions& options_;
  std::vector<std::string>* out_;
};

bool IsClosingToken(std::string_view tok) {
  const std::u32string cps = Decode(tok);
  if (cps.empty()) return false;
  for (char32_t cp : cps) {
    switch (cp) {
      case U',': case U'.': case U'!': case U'?': case U';': case U':':
      case U')': case U']': case U'}': case U'…': case U'%': case U'”':
      case U'»': case U'、': case U'。': case U'，': case U'！': case U'？':
      case U'：': case U'；':
        break;
      default:
        return false;
    }
  }
  return true;
}

bool IsOpeningToken(std::string_view tok) {
  const std::u32string cps = Decode(tok);
  if (cps.size() != 1) return false;
  switch (cps[0]) {
    case U'(': case U'[': case U'{': case U'“': case U'«': case U'¿':
    case U'¡':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text,
                                  const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  ChunkTokenizer tokenizer(options, &tokens);
  for (const std::string& chunk : text::SplitWhitespace(text)) {
    tokenizer.Run(Decode(chunk));
  }
  return tokens;
}

std::string Detokenize(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) {
      const bool glue = IsClosingToken(tokens[i]) ||
                        IsOpeningToken(tokens[i - 1]) ||
                        (text::IsAllHan(tokens[i - 1]) &&
                         text::IsAllHan(tokens[i]));
      if (!glue) out += ' ';
    }
    out += tokens[i];
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> LocateTokens(
    std::string_view text, std::span<const std::string> tokens) {
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  ranges.reserve(tokens.size());
  std::size_t pos = 0;
  for (const std::string& tok : tokens) {
    // Only whitespace may separate consecutive tokens.
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
            text[pos] == '\r')) {
      ++pos;
    }
    if (tok.empty() || text.compare(pos, tok.size(), tok) != 0) {
      // Non-ASCII whitespace is rare; fall back to a forward search.
      std::size_t found = text.find(tok, pos);
      if (found == std::string_view::npos ||
          !text::Trim(text.substr(pos, found - pos)).empty()) {
        return {};
      }
      pos = found;
    }
    ranges.emplace_back(pos, pos + tok.size());
    pos += tok.size();
  }
  if (!text::Trim(text.substr(pos)).empty()) return {};
  return ranges;
}

std::vector<std::pair<std::size_t, std::size_t>> FallbackSegmenter::Boundaries(
    std::string_view text) {
  const std::u32string cps = Decode(text);
  std::vector<std::size_t> starts = {0};  // code point offsets
  auto is_terminal = [](char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?' || cp == U'…';
  };
  auto is_cjk_terminal = [](char32_t cp) {
    return cp == U'。' || cp == U'！' || cp == U'？';
  };
  std::size_t i = 0;
  while (i < cps.size()) {
    if (is_cjk_terminal(cps[i])) {
      std::size_t j = i + 1;
      while (j < cps.size() && is_cjk_terminal(cps[j])) ++j;
      if (j < cps.size()) starts.push_back(j);
      i = j;
      continue;
    }
    if (is_terminal(cps[i])) {
      std::size_t j = i + 1;
      while (j < cps.size() && is_terminal(cps[j])) ++j;
      std::size_t k = j;
      while (k < cps.size() && text::IsSpace(cps[k])) ++k;
      if (k > j && k < cps.size() &&
          (text::IsUpper(cps[k]) || text::IsHan(cps[k]))) {
        starts.push_back(j);
      }
      i = j;
      continue;
    }
    ++i;
  }
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::size_t b = text::ByteOffsetOfCodePoint(text, starts[s]);
    const std::size_t e =
        s + 1 < starts.size() ? text::ByteOffsetOfCodePoint(text, starts[s + 1])
                              : text.size();
    out.emplace_back(b, e);
  }
  return out;
}

std::vector<SentenceRecord> Segment(const std::string& doc_id,
                                    std::string_view document_text,
                                    SegmentationBackend& backend,
                                    const TokenizerOptions& options) {
  auto ranges = backend.Boundaries(document_text);
  std::vector<std::size_t> starts;
  std::size_t previous = 0;
  for (const auto& [b, e] : ranges) {
    if (b > e || e > document_text.size() || b < previous) {
      throw BackendError("segmenter " + backend.Name() +
                         " returned invalid boundary [" + std::to_string(b) +
                         "," + std::to_string(e) + ") for document " + doc_id);
    }
    previous = b;
    if (starts.empty() || starts.back() != b) starts.push_back(b);
  }
  if (starts.empty() || starts.front() != 0) starts.insert(starts.begin(), 0);

  std::vector<SentenceRecord> sentences;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::size_t b = starts[s];
    const std::size_t e =
        s + 1 < starts.size() ? starts[s + 1] : document_text.size();
    std::string_view slice = document_text.substr(b, e - b);
    std::string trimmed = text::Trim(slice);
    if (trimmed.empty()) continue;
    SentenceRecord rec;
    rec.doc_id = doc_id;
    rec.index = static_cast<int>(sentences.size());
    rec.byte_begin = b + slice.find(trimmed);
    rec.byte_end = rec.byte_begin + trimmed.size();
    rec.tokens = Tokenize(trimmed, options);
    rec.text = std::move(trimmed);
    sentences.push_back(std::move(rec));
  }
  return sentences;
}

bool LengthGate(const SentenceRecord& sentence, const LengthLimits& limits) {
  return text::Length(sentence.text) <= limits.max_chars &&
         sentence.tokens.size() >= limits.min_tokens;
}

}  // namespace acs::ingest
