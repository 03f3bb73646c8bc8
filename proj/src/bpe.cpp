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

#include "ametk/bpe.hpp"

#include <fstream>
#include <limits>
#include <set>

#include "ametk/error.hpp"
#include "ametk/utf8.hpp"

namespace ametk::bpe {

namespace {

using SymbolPair = std::pair<std::string, std::string>;

std::string rank_key(std::string_view left, std::string_view right) {
  std::string key;
  key.reserve(left.size() + right.size() + 1);
  key.append(left);
  key.push_back(' ');
  key.append(right);
  return key;
}

std::vector<std::string> word_symbols(std::string_view word,
                                      std::string_view eow) {
  if (word.find(eow) != std::string_view::npos)
    throw DataError("input text contains the end-of-word marker '" +
                    std::string(eow) + "'");
  std::vector<std::string> symbols;
  for (char32_t cp : utf8::decode(word)) {
    if (utf8::is_space(cp))
      throw DataError("BPE words must not contain whitespace");
    std::string s;
    utf8::append(cp, s);
    symbols.push_back(std::move(s));
  }
  symbols.emplace_back(eow);
  return symbols;
}

// Replaces every adjacent (left, right) occurrence, left to right,
// non-overlapping.
void apply_merge(std::vector<std::string>& symbols, const SymbolPair& merge) {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  std::size_t i = 0;
  while (i < symbols.size()) {
    if (i + 1 < symbols.size() && symbols[i] == merge.first &&
        symbols[i + 1] == merge.second) {
      out.push_back(merge.first + merge.second);
      i += 2;
    } else {
      out.push_back(std::move(symbols[i]));
      ++i;
    }
  }
  symbols = std::move(out);
}

}  // namespace

void BpeModel::rebuild_vocab() {
  vocab.clear();
  vocab.insert(eow);
  for (const auto& [left, right] : merges) {
    vocab.insert(left);
    vocab.insert(right);
    vocab.insert(left + right);
  }
}

WordCounts count_words(std::span<const std::string> lines) {
  WordCounts counts;
  for (const auto& line : lines) {
    for (auto& word : utf8::split_words(line)) ++counts[word];
  }
  return counts;
}

BpeModel learn(const WordCounts& word_counts, std::size_t num_merges,
               std::string_view eow) {
  BpeModel model;
  model.eow = std::string(eow);

  struct Word {
    std::vector<std::string> symbols;
    std::uint64_t count = 0;
  };
  std::vector<Word> words;
  words.reserve(word_counts.size());
  for (const auto& [word, count] : word_counts) {
    if (word.empty() || count == 0)
      throw DataError("word counts must have non-empty words and positive counts");
    words.push_back({word_symbols(word, eow), count});
  }

  // Weighted adjacent-pair counts plus, per pair, the words containing it.
  // std::map keeps scans deterministic and makes the lexicographically
  // smallest pair the first maximum found.
  std::map<SymbolPair, std::uint64_t> pair_counts;
  std::map<SymbolPair, std::set<std::size_t>> pair_words;
  const auto add_word = [&](std::size_t w) {
    const auto& symbols = words[w].symbols;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      SymbolPair p{symbols[i], symbols[i + 1]};
      pair_counts[p] += words[w].count;
      pair_words[p].insert(w);
    }
  };
  const auto remove_word = [&](std::size_t w) {
    const auto& symbols = words[w].symbols;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      SymbolPair p{symbols[i], symbols[i + 1]};
      auto it = pair_counts.find(p);
      it->second -= words[w].count;
      if (it->second == 0) {
        pair_counts.erase(it);
        pair_words.erase(p);
      }
    }
  };
  for (std::size_t w = 0; w < words.size(); ++w) add_word(w);

  for (std::size_t iter = 0; iter < num_merges; ++iter) {
    const SymbolPair* best = nullptr;
    std::uint64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best_count = count;
        best = &pair;
      }
    }
    if (best == nullptr || best_count < 2) break;
    const SymbolPair merge = *best;
    model.merges.push_back(merge);

    // Only words containing the pair change; copy the id set because the
    // index mutates underneath.
    const std::set<std::size_t> affected = pair_words[merge];
    for (std::size_t w : affected) {
      remove_word(w);
      apply_merge(words[w].symbols, merge);
      add_word(w);
    }
  }

  model.rebuild_vocab();
  return model;
}

std::vector<std::string> apply_word(const BpeModel& model,
                                    std::string_view word) {
  std::vector<std::string> symbols = word_symbols(word, model.eow);
  if (model.merges.empty()) return symbols;

  // Rank-ordered application: repeatedly rewrite the earliest-learned pair
  // present. Any pair created by a merge involves the merged symbol and can
  // only have been learned later, so this equals in-order application.
  std::unordered_map<std::string, std::size_t> ranks;
  ranks.reserve(model.merges.size());
  for (std::size_t r = 0; r < model.merges.size(); ++r) {
    ranks.emplace(rank_key(model.merges[r].first, model.merges[r].second), r);
  }
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = ranks.find(rank_key(symbols[i], symbols[i + 1]));
      if (it != ranks.end() && it->second < best_rank) best_rank = it->second;
    }
    if (best_rank == std::numeric_limits<std::size_t>::max()) break;
    apply_merge(symbols, model.merges[best_rank]);
  }
  return symbols;
}

std::vector<std::string> apply(const BpeModel& model, std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto& word : utf8::split_words(text)) {
    auto word_tokens = apply_word(model, word);
    tokens.insert(tokens.end(), std::make_move_iterator(word_tokens.begin()),
                  std::make_move_iterator(word_tokens.end()));
  }
  return tokens;
}

std::string decode(std::span<const std::string> tokens, std::string_view eow) {
  std::string joined;
  for (const auto& token : tokens) joined += token;
  std::string out;
  out.reserve(joined.size());
  std::size_t start = 0;
  while (start <= joined.size()) {
    const auto pos = joined.find(eow, start);
    if (pos == std::string::npos) {
      out.append(joined, start, joined.size() - start);
      break;
    }
    out.append(joined, start, pos - start);
    out.push_back(' ');
    start = pos + eow.size();
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::vector<std::string> Applier::apply_line(std::string_view line) {
  std::vector<std::string> tokens;
  for (const auto& word : utf8::split_words(line)) {
    auto [it, inserted] = cache_.try_emplace(word);
    if (inserted) it->second = apply_word(model_, word);
    tokens.insert(tokens.end(), it->second.begin(), it->second.end());
  }
  return tokens;
}

void BpeModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path.string());
  out << "#bpe v1 eow=" << eow << '\n';
  for (const auto& [left, right] : merges) out << left << ' ' << right << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

BpeModel BpeModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw DataError(path.string() + ": empty model file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  constexpr std::string_view kHeader = "#bpe v1 eow=";
  if (line.rfind(kHeader, 0) != 0)
    throw DataError(path.string() + ": bad header '" + line + "'");
  BpeModel model;
  model.eow = line.substr(kHeader.size());
  if (model.eow.empty())
    throw DataError(path.string() + ": empty end-of-word marker");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0 ||
        space + 1 >= line.size() ||
        line.find(' ', space + 1) != std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 'left right'");
    model.merges.emplace_back(line.substr(0, space), line.substr(space + 1));
  }
  model.rebuild_vocab();
  return model;
}

}  // namespace ametk::bpe
