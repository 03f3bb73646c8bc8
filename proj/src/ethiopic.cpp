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

#include "ametk/ethiopic.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ametk/error.hpp"
#include "ametk/utf8.hpp"

namespace ametk::ethiopic {

namespace {

std::string hex(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
  return buf;
}

// An equivalence cell while learning: its fixed-table target plus all member
// code points across the family's series.
struct CellSpec {
  char32_t family = 0;
  int order = 0;
  char32_t fixed_target = 0;
  std::vector<char32_t> members;
};

// Expands families into cells. Orders with an exception targeting another
// order of the canonical series are merged into that order's cell, so the
// learned table keeps the same exception structure as the fixed one.
std::vector<CellSpec> build_cells(const std::vector<HomophoneFamily>& families) {
  std::vector<CellSpec> cells;
  for (const auto& fam : families) {
    fam.validate();
    std::map<int, CellSpec> by_order;   // cell index -> spec
    std::vector<CellSpec> standalone;   // exception targets outside the canonical run
    for (int k = 0; k < kOrders; ++k) {
      auto exc = fam.order_exceptions.find(k);
      if (exc == fam.order_exceptions.end()) {
        CellSpec& cell = by_order[k];
        cell.family = fam.canonical;
        cell.order = k;
        cell.fixed_target = fam.canonical + static_cast<char32_t>(k);
        for (char32_t base : fam.series)
          cell.members.push_back(base + static_cast<char32_t>(k));
        continue;
      }
      const char32_t target = exc->second;
      if (target >= fam.canonical && target < fam.canonical + kOrders) {
        const int j = static_cast<int>(target - fam.canonical);
        CellSpec& cell = by_order[j];
        cell.family = fam.canonical;
        cell.order = j;
        cell.fixed_target = target;
        for (char32_t base : fam.series)
          cell.members.push_back(base + static_cast<char32_t>(k));
      } else {
        CellSpec cell;
        cell.family = fam.canonical;
        cell.order = k;
        cell.fixed_target = target;
        for (char32_t base : fam.series)
          cell.members.push_back(base + static_cast<char32_t>(k));
        standalone.push_back(std::move(cell));
      }
    }
    for (auto& [order, cell] : by_order) {
      std::sort(cell.members.begin(), cell.members.end());
      cells.push_back(std::move(cell));
    }
    for (auto& cell : standalone) {
      std::sort(cell.members.begin(), cell.members.end());
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace

void HomophoneFamily::validate() const {
  if (series.empty()) throw DataError("homophone family has no series");
  for (char32_t base : series) {
    if (!is_ethiopic(base) || !is_ethiopic(base + kOrders - 1) ||
        ((base - kBlockFirst) & 7) != 0) {
      throw DataError("series base " + hex(base) +
                      " is not the start of a 7-order Ethiopic run");
    }
  }
  if (std::find(series.begin(), series.end(), canonical) == series.end())
    throw DataError("canonical series " + hex(canonical) +
                    " is not a member of the family");
  for (const auto& [order, target] : order_exceptions) {
    if (order < 0 || order >= kOrders)
      throw DataError("order exception index out of range: " +
                      std::to_string(order));
    if (!is_ethiopic(target))
      throw DataError("order exception target " + hex(target) +
                      " is not Ethiopic");
  }
}

const std::vector<HomophoneFamily>& default_families() {
  // ha: ሀ ሐ ኀ; sa: ሰ ሠ; a: አ ዐ; tsa: ጸ ፀ. The 4th-order characters of the
  // ha and a families (ሃ ሓ ኃ, ኣ ዓ) normalize to the 1st-order canonical.
  static const std::vector<HomophoneFamily> kFamilies = {
      {{0x1200, 0x1210, 0x1280}, 0x1200, {{3, 0x1200}}},
      {{0x1230, 0x1220}, 0x1230, {}},
      {{0x12A0, 0x12D0}, 0x12A0, {{3, 0x12A0}}},
      {{0x1338, 0x1340}, 0x1338, {}},
  };
  return kFamilies;
}

NormalizationTable NormalizationTable::from_mapping(
    std::map<char32_t, char32_t> mapping, TableMode mode) {
  for (const auto& [src, dst] : mapping) {
    if (src == dst)
      throw DataError("table maps " + hex(src) + " to itself");
    if (mapping.count(dst))
      throw DataError("table is not idempotent: target " + hex(dst) +
                      " of " + hex(src) + " is itself remapped");
    if (!is_ethiopic(src) || !is_ethiopic(dst))
      throw DataError("table entry " + hex(src) + " -> " + hex(dst) +
                      " leaves the Ethiopic block");
  }
  NormalizationTable t;
  t.mapping_ = std::move(mapping);
  t.mode_ = mode;
  return t;
}

const NormalizationTable& default_table() {
  static const NormalizationTable kTable = [] {
    std::map<char32_t, char32_t> m;
    for (const auto& fam : default_families()) {
      for (int k = 0; k < kOrders; ++k) {
        auto exc = fam.order_exceptions.find(k);
        const char32_t target = exc != fam.order_exceptions.end()
                                    ? exc->second
                                    : fam.canonical + static_cast<char32_t>(k);
        for (char32_t base : fam.series) {
          const char32_t source = base + static_cast<char32_t>(k);
          if (source != target) m[source] = target;
        }
      }
    }
    return NormalizationTable::from_mapping(std::move(m), TableMode::fixed);
  }();
  return kTable;
}

std::u32string normalize_text(std::u32string_view text,
                              const NormalizationTable& table) {
  std::u32string out(text);
  for (char32_t& cp : out) cp = table.map(cp);
  return out;
}

std::string normalize_text(std::string_view text,
                           const NormalizationTable& table) {
  return utf8::encode(normalize_text(utf8::decode(text), table));
}

std::string CellFrequencyReport::to_tsv() const {
  std::ostringstream out;
  out << "# family\torder\tcodepoint\tcount\tchosen\n";
  for (const auto& cell : cells) {
    for (const auto& m : cell.members) {
      out << hex(cell.family) << '\t' << cell.order << '\t'
          << hex(m.codepoint) << '\t' << m.count << '\t' << (m.chosen ? 1 : 0)
          << '\n';
    }
  }
  return out.str();
}

LearnResult learn_table(const std::map<char32_t, std::uint64_t>& char_counts,
                        const std::vector<HomophoneFamily>& families) {
  LearnResult result;
  std::map<char32_t, char32_t> mapping;
  for (CellSpec& cell : build_cells(families)) {
    std::uint64_t total = 0;
    std::vector<CellMember> members;
    members.reserve(cell.members.size());
    for (char32_t cp : cell.members) {
      auto it = char_counts.find(cp);
      const std::uint64_t count = it == char_counts.end() ? 0 : it->second;
      total += count;
      members.push_back({cp, count, false});
    }
    char32_t target = cell.fixed_target;
    if (total > 0) {
      // Most frequent member wins. Ties prefer the fixed default target when
      // it is among the maxima, otherwise the lowest code point (`members`
      // is sorted, so the first maximum is the lowest).
      std::uint64_t best = 0;
      for (const auto& m : members) best = std::max(best, m.count);
      target = 0;
      for (const auto& m : members) {
        if (m.count == best && m.codepoint == cell.fixed_target) {
          target = m.codepoint;
          break;
        }
      }
      if (target == 0) {
        for (const auto& m : members) {
          if (m.count == best) {
            target = m.codepoint;
            break;
          }
        }
      }
    }
    for (auto& m : members) m.chosen = (m.codepoint == target);
    for (const auto& m : members) {
      if (m.codepoint != target) mapping[m.codepoint] = target;
    }
    result.report.cells.push_back(
        {cell.family, cell.order, std::move(members)});
  }
  result.table =
      NormalizationTable::from_mapping(std::move(mapping), TableMode::learned);
  return result;
}

LearnResult learn_table(std::span<const std::string> corpus,
                        const std::vector<HomophoneFamily>& families) {
  std::map<char32_t, std::uint64_t> counts;
  for (const auto& line : corpus) {
    for (char32_t cp : utf8::decode(line)) {
      if (is_ethiopic(cp)) ++counts[cp];
    }
  }
  return learn_table(counts, families);
}

NormalizationTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open table file: " + path.string());
  std::map<char32_t, char32_t> mapping;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto parse_hex = [&](std::string_view field) -> char32_t {
      unsigned value = 0;
      auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value, 16);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": malformed code point '" + std::string(field) + "'");
      return static_cast<char32_t>(value);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected <source>\\t<target>");
    const char32_t src = parse_hex(std::string_view(line).substr(0, tab));
    const char32_t dst = parse_hex(std::string_view(line).substr(tab + 1));
    if (mapping.count(src))
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": duplicate source " + hex(src));
    mapping[src] = dst;
  }
  return NormalizationTable::from_mapping(std::move(mapping),
                                          TableMode::fixed);
}

void save_table(const NormalizationTable& table,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write table file: " + path.string());
  out << "# source\ttarget (hex code points)\n";
  for (const auto& [src, dst] : table.mapping())
    out << hex(src) << '\t' << hex(dst) << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace ametk::ethiopic
