// Copyright 2026 The ametk Authors
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

#include "ametk/textclean.hpp"

#include <algorithm>
#include <fstream>

#include "ametk/error.hpp"
#include "ametk/ethiopic.hpp"
#include "ametk/utf8.hpp"

namespace ametk::textclean {

namespace {

struct Range {
  char32_t first, last;
};

// Emoji_Presentation=Yes ranges from the Unicode emoji data.
constexpr Range kEmojiPresentation[] = {
    {0x231A, 0x231B},   {0x23E9, 0x23EC},   {0x23F0, 0x23F0},
    {0x23F3, 0x23F3},   {0x25FD, 0x25FE},   {0x2614, 0x2615},
    {0x2648, 0x2653},   {0x267F, 0x267F},   {0x2693, 0x2693},
    {0x26A1, 0x26A1},   {0x26AA, 0x26AB},   {0x26BD, 0x26BE},
    {0x26C4, 0x26C5},   {0x26CE, 0x26CE},   {0x26D4, 0x26D4},
    {0x26EA, 0x26EA},   {0x26F2, 0x26F3},   {0x26F5, 0x26F5},
    {0x26FA, 0x26FA},   {0x26FD, 0x26FD},   {0x2705, 0x2705},
    {0x270A, 0x270B},   {0x2728, 0x2728},   {0x274C, 0x274C},
    {0x274E, 0x274E},   {0x2753, 0x2755},   {0x2757, 0x2757},
    {0x2795, 0x2797},   {0x27B0, 0x27B0},   {0x27BF, 0x27BF},
    {0x2B1B, 0x2B1C},   {0x2B50, 0x2B50},   {0x2B55, 0x2B55},
    {0x1F004, 0x1F004}, {0x1F0CF, 0x1F0CF}, {0x1F18E, 0x1F18E},
    {0x1F191, 0x1F19A}, {0x1F1E6, 0x1F1FF}, {0x1F201, 0x1F201},
    {0x1F21A, 0x1F21A}, {0x1F22F, 0x1F22F}, {0x1F232, 0x1F236},
    {0x1F238, 0x1F23A}, {0x1F250, 0x1F251}, {0x1F300, 0x1F320},
    {0x1F32D, 0x1F335}, {0x1F337, 0x1F37C}, {0x1F37E, 0x1F393},
    {0x1F3A0, 0x1F3CA}, {0x1F3CF, 0x1F3D3}, {0x1F3E0, 0x1F3F0},
    {0x1F3F4, 0x1F3F4}, {0x1F3F8, 0x1F43E}, {0x1F440, 0x1F440},
    {0x1F442, 0x1F4FC}, {0x1F4FF, 0x1F53D}, {0x1F54B, 0x1F54E},
    {0x1F550, 0x1F567}, {0x1F57A, 0x1F57A}, {0x1F595, 0x1F596},
    {0x1F5A4, 0x1F5A4}, {0x1F5FB, 0x1F64F}, {0x1F680, 0x1F6C5},
    {0x1F6CC, 0x1F6CC}, {0x1F6D0, 0x1F6D2}, {0x1F6D5, 0x1F6D7},
    {0x1F6DC, 0x1F6DF}, {0x1F6EB, 0x1F6EC}, {0x1F6F4, 0x1F6FC},
    {0x1F7E0, 0x1F7EB}, {0x1F7F0, 0x1F7F0}, {0x1F90C, 0x1F93A},
    {0x1F93C, 0x1F945}, {0x1F947, 0x1F9FF}, {0x1FA70, 0x1FA7C},
    {0x1FA80, 0x1FA89}, {0x1FA8F, 0x1FAC6}, {0x1FACE, 0x1FADC},
    {0x1FADF, 0x1FAE9}, {0x1FAF0, 0x1FAF8},
};

constexpr char32_t kVariationSelector15 = 0xFE0E;
constexpr char32_t kVariationSelector16 = 0xFE0F;
constexpr char32_t kZeroWidthJoiner = 0x200D;
constexpr char32_t kCombiningKeycap = 0x20E3;

// Symbols like ☀ or ▶ default to text presentation but become emoji when
// followed by VS-16; anything in these blocks plus a VS-16 is treated as
// emoji. Keycap bases (#, *, 0-9) are handled the same way.
bool is_emoji_capable_base(char32_t cp) {
  if ((cp >= 0x2070 && cp <= 0x2BFF) || (cp >= 0x1F000 && cp <= 0x1FBFF))
    return true;
  return cp == 0x00A9 || cp == 0x00AE || cp == 0x203C || cp == 0x2049 ||
         cp == 0x3030 || cp == 0x303D || cp == 0x3297 || cp == 0x3299 ||
         cp == '#' || cp == '*' || (cp >= '0' && cp <= '9');
}

bool is_skin_tone(char32_t cp) { return cp >= 0x1F3FB && cp <= 0x1F3FF; }

// Consumes one emoji element (base + trailing VS/skin tone/keycap marks)
// starting at i, or returns i unchanged if cps[i] does not start one.
std::size_t consume_emoji_element(const std::u32string& cps, std::size_t i) {
  const std::size_t n = cps.size();
  if (i >= n) return i;
  const char32_t cp = cps[i];
  std::size_t j = i;
  if (is_emoji_presentation(cp)) {
    ++j;
  } else if (is_emoji_capable_base(cp) && i + 1 < n &&
             (cps[i + 1] == kVariationSelector16 ||
              (cps[i + 1] == kCombiningKeycap))) {
    ++j;  // base consumed; marks below take the rest
  } else {
    return i;
  }
  while (j < n && (cps[j] == kVariationSelector15 ||
                   cps[j] == kVariationSelector16 || is_skin_tone(cps[j]) ||
                   cps[j] == kCombiningKeycap)) {
    ++j;
  }
  return j;
}

std::string strip_emoji(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    std::size_t j = consume_emoji_element(cps, i);
    if (j == i) {
      utf8::append(cps[i], out);
      ++i;
      continue;
    }
    // Follow ZWJ-joined continuations so whole sequences disappear.
    while (j < cps.size() && cps[j] == kZeroWidthJoiner) {
      const std::size_t k = consume_emoji_element(cps, j + 1);
      if (k == j + 1) break;
      j = k;
    }
    i = j;
  }
  return out;
}

bool has_url_prefix(std::string_view token) {
  static constexpr std::string_view kPrefixes[] = {"http://", "https://",
                                                   "www."};
  for (std::string_view prefix : kPrefixes) {
    if (token.size() < prefix.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      char c = token[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != prefix[i]) {
        match = false;
        break;
      }
    }
    if (match) return true;
  }
  return false;
}

// Removes whole whitespace-delimited tokens that start with a URL scheme or
// "www.". Non-URL tokens keep their original bytes and separators.
std::string strip_urls(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < cps.size()) {
    if (utf8::is_space(cps[i])) {
      utf8::append(cps[i], out);
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < cps.size() && !utf8::is_space(cps[j])) ++j;
    const std::string token = utf8::encode(
        std::u32string_view(cps).substr(i, j - i));
    if (!has_url_prefix(token)) out += token;
    i = j;
  }
  return out;
}

std::string lowercase_latin(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::size_t count_tokens(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::size_t tokens = 0;
  bool in_token = false;
  for (char32_t cp : cps) {
    if (utf8::is_space(cp)) {
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      ++tokens;
    }
  }
  return tokens;
}

bool is_latin_letter(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
         (cp >= 0x00C0 && cp <= 0x024F && cp != 0x00D7 && cp != 0x00F7);
}

}  // namespace

bool is_emoji_presentation(char32_t cp) {
  for (const Range& r : kEmojiPresentation) {
    if (cp >= r.first && cp <= r.last) return true;
  }
  return false;
}

std::string strip_noise(std::string_view text, const CleanOptions& opts) {
  std::string out(text);
  if (opts.strip_urls) out = strip_urls(out);
  if (opts.strip_emoji) out = strip_emoji(out);
  return out;
}

std::string finish_clean(std::string_view text, const CleanOptions& opts) {
  std::string out(text);
  if (opts.lowercase_latin) out = lowercase_latin(out);
  if (opts.collapse_whitespace) out = utf8::normalize_whitespace(out);
  return out;
}

std::string clean_sentence(std::string_view text, const CleanOptions& opts) {
  return finish_clean(strip_noise(text, opts), opts);
}

AbbreviationLexicon AbbreviationLexicon::from_entries(
    std::vector<std::pair<std::string, std::string>> entries) {
  AbbreviationLexicon lex;
  for (auto& [surface, expansion] : entries) {
    if (surface.empty()) throw DataError("empty abbreviation surface form");
    for (const auto& existing : lex.entries_) {
      if (existing.first == surface)
        throw DataError("duplicate abbreviation surface form: " + surface);
    }
    const unsigned char bucket = static_cast<unsigned char>(surface[0]);
    lex.buckets_[bucket].push_back(
        {surface, expansion, lex.entries_.size()});
    lex.entries_.emplace_back(std::move(surface), std::move(expansion));
  }
  for (auto& bucket : lex.buckets_) {
    std::sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
      if (a.surface.size() != b.surface.size())
        return a.surface.size() > b.surface.size();
      return a.order < b.order;
    });
  }
  return lex;
}

AbbreviationLexicon AbbreviationLexicon::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected <surface>\\t<expansion>");
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return from_entries(std::move(entries));
}

std::string AbbreviationLexicon::expand(std::string_view text) const {
  if (entries_.empty()) return std::string(text);
  const std::u32string cps = utf8::decode(text);
  const std::size_t n = cps.size();
  // Canonical encoding plus the byte offset of every code point, so surface
  // matching can run on bytes while boundaries stay code-point exact.
  std::string bytes;
  std::vector<std::size_t> offset;
  offset.reserve(n + 1);
  for (char32_t cp : cps) {
    offset.push_back(bytes.size());
    utf8::append(cp, bytes);
  }
  offset.push_back(bytes.size());

  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;  // code point index, always at a token start below
  while (i < n) {
    if (utf8::is_space(cps[i])) {
      utf8::append(cps[i], out);
      ++i;
      continue;
    }
    const Entry* hit = nullptr;
    std::size_t hit_end = 0;
    const unsigned char b0 = static_cast<unsigned char>(bytes[offset[i]]);
    for (const Entry& e : buckets_[b0]) {
      const std::size_t len = e.surface.size();
      if (offset[i] + len > bytes.size()) continue;
      if (bytes.compare(offset[i], len, e.surface) != 0) continue;
      const auto it =
          std::lower_bound(offset.begin(), offset.end(), offset[i] + len);
      if (it == offset.end() || *it != offset[i] + len) continue;
      const std::size_t end = static_cast<std::size_t>(it - offset.begin());
      if (end < n && !utf8::is_space(cps[end])) continue;
      hit = &e;
      hit_end = end;
      break;  // buckets are longest-first
    }
    if (hit != nullptr) {
      out += hit->expansion;
      i = hit_end;
    } else {
      while (i < n && !utf8::is_space(cps[i])) {
        utf8::append(cps[i], out);
        ++i;
      }
    }
  }
  return out;
}

void FilterRules::validate() const {
  if (min_chars < 1) throw UsageError("min_chars must be >= 1");
  if (max_chars < min_chars)
    throw UsageError("max_chars must be >= min_chars");
  if (max_length_ratio <= 1.0)
    throw UsageError("max_length_ratio must be > 1");
  if (min_source_script_fraction < 0.0 || min_source_script_fraction > 1.0)
    throw UsageError("min_source_script_fraction must be in [0, 1]");
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::none:
      return "keep";
    case DropReason::too_short:
      return "too_short";
    case DropReason::too_long:
      return "too_long";
    case DropReason::ratio:
      return "ratio";
    case DropReason::script:
      return "script";
  }
  return "unknown";
}

DropReason filter_pair(std::string_view source, std::string_view target,
                       const FilterRules& rules) {
  const std::size_t src_chars = utf8::length(source);
  const std::size_t tgt_chars = utf8::length(target);
  if (src_chars < rules.min_chars || tgt_chars < rules.min_chars)
    return DropReason::too_short;
  if (src_chars > rules.max_chars || tgt_chars > rules.max_chars)
    return DropReason::too_long;

  const std::size_t src_tokens = count_tokens(source);
  const std::size_t tgt_tokens = count_tokens(target);
  const std::size_t longer = std::max(src_tokens, tgt_tokens);
  const std::size_t shorter = std::min(src_tokens, tgt_tokens);
  if (shorter == 0 ||
      static_cast<double>(longer) >
          rules.max_length_ratio * static_cast<double>(shorter))
    return DropReason::ratio;

  std::size_t ethiopic_letters = 0;
  std::size_t other_letters = 0;
  for (char32_t cp : utf8::decode(source)) {
    if (ethiopic::is_ethiopic_letter(cp))
      ++ethiopic_letters;
    else if (is_latin_letter(cp))
      ++other_letters;
  }
  const std::size_t letters = ethiopic_letters + other_letters;
  if (letters > 0 &&
      static_cast<double>(ethiopic_letters) <
          rules.min_source_script_fraction * static_cast<double>(letters))
    return DropReason::script;

  return DropReason::none;
}

}  // namespace ametk::textclean
