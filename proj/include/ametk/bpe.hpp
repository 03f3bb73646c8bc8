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

// Byte-pair-encoding subword tokenization over Unicode code points: learn a
// merge list from word counts, apply merges to text, decode tokens back.
// Merging operates on code points rather than raw bytes so multi-byte
// Ethiopic characters never split.

#ifndef AMETK_BPE_HPP_
#define AMETK_BPE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ametk::bpe {

inline constexpr std::string_view kDefaultEow = "</w>";

struct BpeModel {
  // Merge rules in learned order; applying them in order is the tokenizer.
  std::vector<std::pair<std::string, std::string>> merges;
  std::string eow{kDefaultEow};
  // Known symbols: every initial character seen in a merge plus each merge's
  // concatenation. Derived from `merges`.
  std::unordered_set<std::string> vocab;

  void rebuild_vocab();

  // Model file: header `#bpe v1 eow=</w>`, then one `left right` per line in
  // learned order (symbols never contain whitespace).
  static BpeModel load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

using WordCounts = std::map<std::string, std::uint64_t>;

WordCounts count_words(std::span<const std::string> lines);

// Learns up to num_merges merges: each iteration merges the adjacent symbol
// pair with the highest weighted count, stopping early once the best pair
// occurs fewer than 2 times. Ties go to the lexicographically smallest
// (left, right) pair, which makes the result independent of word order.
BpeModel learn(const WordCounts& word_counts, std::size_t num_merges,
               std::string_view eow = kDefaultEow);

// Tokenizes one whitespace-free word: code point symbols plus a trailing
// end-of-word marker, then merges applied in learned order (each merge
// rewrites all its adjacent occurrences before the next is considered).
std::vector<std::string> apply_word(const BpeModel& model,
                                    std::string_view word);

// Whitespace-splits text and tokenizes each word.
std::vector<std::string> apply(const BpeModel& model, std::string_view text);

// Inverse of apply: concatenates symbols, turns each end-of-word marker into
// a space, trims the trailing one.
std::string decode(std::span<const std::string> tokens,
                   std::string_view eow = kDefaultEow);

// Per-word memo for corpus-scale tokenization.
class Applier {
 public:
  explicit Applier(const BpeModel& model) : model_(model) {}
  std::vector<std::string> apply_line(std::string_view line);

 private:
  const BpeModel& model_;
  std::unordered_map<std::string, std::vector<std::string>> cache_;
};

}  // namespace ametk::bpe

#endif  // AMETK_BPE_HPP_
