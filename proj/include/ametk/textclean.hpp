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

// Sentence-level cleaning: URL and emoji removal, Latin lowercasing,
// whitespace collapsing, abbreviation expansion, and noise filtering of
// sentence pairs.

#ifndef AMETK_TEXTCLEAN_HPP_
#define AMETK_TEXTCLEAN_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ametk::textclean {

struct CleanOptions {
  bool strip_urls = true;
  bool strip_emoji = true;
  bool lowercase_latin = true;
  bool collapse_whitespace = true;
};

// Emoji-presentation code points (plus attached VS-16/ZWJ sequences and
// keycap marks are consumed alongside them by the stripper).
bool is_emoji_presentation(char32_t cp);

// Full cleaning pass in a fixed order: strip URLs, strip emoji, lowercase
// Latin, collapse whitespace. Idempotent for any fixed options.
std::string clean_sentence(std::string_view text, const CleanOptions& opts);

// The two halves of clean_sentence, split so abbreviation expansion can run
// between them (surface forms are case-sensitive, so expansion must see the
// text before lowercasing).
std::string strip_noise(std::string_view text, const CleanOptions& opts);
std::string finish_clean(std::string_view text, const CleanOptions& opts);

// Ordered abbreviation lexicon for one language side. Expansion is a single
// left-to-right pass, longest match first, token boundaries only; expansions
// are never rescanned.
class AbbreviationLexicon {
 public:
  AbbreviationLexicon() = default;

  // TSV file, one `surface\texpansion` per line, `#` comments allowed.
  static AbbreviationLexicon load(const std::filesystem::path& path);
  static AbbreviationLexicon from_entries(
      std::vector<std::pair<std::string, std::string>> entries);

  std::string expand(std::string_view text) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::string surface;
    std::string expansion;
    std::size_t order = 0;  // insertion order, breaks equal-length ties
  };
  // Grouped by first byte; each bucket sorted longest surface first.
  std::vector<Entry> buckets_[256];
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct FilterRules {
  std::size_t min_chars = 2;      // code points, per side
  std::size_t max_chars = 2000;   // code points, per side
  double max_length_ratio = 9.0;  // longer/shorter, whitespace tokens
  double min_source_script_fraction = 0.5;  // Ethiopic share of letters

  void validate() const;  // throws UsageError on violation
};

enum class DropReason : std::uint8_t { none, too_short, too_long, ratio, script };

std::string_view to_string(DropReason reason);

// Checks the rules in the fixed order too_short, too_long, ratio, script and
// reports the first violation; DropReason::none means keep. Expects already
// cleaned text.
DropReason filter_pair(std::string_view source, std::string_view target,
                       const FilterRules& rules);

}  // namespace ametk::textclean

#endif  // AMETK_TEXTCLEAN_HPP_
