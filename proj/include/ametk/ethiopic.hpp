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

// Amharic homophone character normalization.
//
// Several Fidel consonants are pronounced identically (ሀ/ሐ/ኀ, ሰ/ሠ, አ/ዐ,
// ጸ/ፀ) and are used interchangeably in modern text. Each consonant series
// spans seven vowel orders at consecutive code points, so an equivalence
// cell is the set of same-order characters across the series of one family.
// Normalization maps every cell member to a single representative, either
// from the built-in table or from one learned by corpus frequency.

#ifndef AMETK_ETHIOPIC_HPP_
#define AMETK_ETHIOPIC_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ametk::ethiopic {

inline constexpr char32_t kBlockFirst = 0x1200;
inline constexpr char32_t kBlockLast = 0x137F;
inline constexpr int kOrders = 7;

inline bool is_ethiopic(char32_t cp) {
  return cp >= kBlockFirst && cp <= kBlockLast;
}

// Letters only; excludes Ethiopic punctuation (U+1360..) and numerals.
inline bool is_ethiopic_letter(char32_t cp) {
  return cp >= kBlockFirst && cp <= 0x135A;
}

// One homophone family: the base code points of its member series, which of
// them is canonical, and per-order overrides (e.g. the 4th-order characters
// of the ha and a families normalize to the 1st-order canonical character
// instead of staying order-aligned).
struct HomophoneFamily {
  std::vector<char32_t> series;          // base code point of each 7-order run
  char32_t canonical = 0;                // must be one of `series`
  std::map<int, char32_t> order_exceptions;  // order index (0..6) -> target

  void validate() const;  // throws DataError on violation
};

const std::vector<HomophoneFamily>& default_families();

enum class TableMode { fixed, learned };

// A per-character replacement map. Valid tables are idempotent (no value is
// itself a key), never map a key to itself, and stay inside the Ethiopic
// block.
class NormalizationTable {
 public:
  NormalizationTable() = default;

  // Validates the invariants above; throws DataError on violation.
  static NormalizationTable from_mapping(std::map<char32_t, char32_t> mapping,
                                         TableMode mode);

  // Identity for unmapped code points.
  char32_t map(char32_t cp) const {
    auto it = mapping_.find(cp);
    return it == mapping_.end() ? cp : it->second;
  }

  const std::map<char32_t, char32_t>& mapping() const { return mapping_; }
  TableMode mode() const { return mode_; }
  bool empty() const { return mapping_.empty(); }

  friend bool operator==(const NormalizationTable& a,
                         const NormalizationTable& b) {
    return a.mapping_ == b.mapping_;
  }

 private:
  std::map<char32_t, char32_t> mapping_;
  TableMode mode_ = TableMode::fixed;
};

// The built-in table over the four default families, order-aligned with the
// 4th-order exceptions of the ha and a families.
const NormalizationTable& default_table();

// Replaces every mapped code point; everything else passes through. Total
// and code-point-length preserving.
std::u32string normalize_text(std::u32string_view text,
                              const NormalizationTable& table);
std::string normalize_text(std::string_view text,
                           const NormalizationTable& table);

// Frequency report for learned normalization: every cell member with its
// corpus count and whether it was chosen as the cell target.
struct CellMember {
  char32_t codepoint = 0;
  std::uint64_t count = 0;
  bool chosen = false;
};
struct Cell {
  char32_t family = 0;  // canonical series base, identifies the family
  int order = 0;
  std::vector<CellMember> members;
};
struct CellFrequencyReport {
  std::vector<Cell> cells;

  // TSV: family<TAB>order<TAB>codepoint<TAB>count<TAB>chosen, hex code points.
  std::string to_tsv() const;
};

struct LearnResult {
  NormalizationTable table;
  CellFrequencyReport report;
};

// Picks the most frequent member of each equivalence cell as its target
// (ties: lowest code point; empty cells: the fixed default target). Counting
// may be sharded by the caller; only the summed counts matter here.
LearnResult learn_table(
    const std::map<char32_t, std::uint64_t>& char_counts,
    const std::vector<HomophoneFamily>& families = default_families());

// Convenience overload that counts the corpus lines itself.
LearnResult learn_table(
    std::span<const std::string> corpus,
    const std::vector<HomophoneFamily>& families = default_families());

// Table file format: UTF-8 TSV, one `<hex source>\t<hex target>` per line,
// `#` comments and blank lines allowed.
NormalizationTable load_table(const std::filesystem::path& path);
void save_table(const NormalizationTable& table,
                const std::filesystem::path& path);

}  // namespace ametk::ethiopic

#endif  // AMETK_ETHIOPIC_HPP_
