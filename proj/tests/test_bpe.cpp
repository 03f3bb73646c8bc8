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

#include <map>
#include <random>

#include "ametk/error.hpp"
#include "ametk/utf8.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ametk;
using bpe::BpeModel;

namespace {

using Merge = std::pair<std::string, std::string>;

std::vector<std::string> symbols_of(const std::string& word,
                                    const std::string& eow) {
  std::vector<std::string> syms;
  for (char32_t cp : utf8::decode(word)) {
    std::string s;
    utf8::append(cp, s);
    syms.push_back(s);
  }
  syms.push_back(eow);
  return syms;
}

void replace_all(std::vector<std::string>& syms, const Merge& merge) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < syms.size();) {
    if (i + 1 < syms.size() && syms[i] == merge.first &&
        syms[i + 1] == merge.second) {
      out.push_back(merge.first + merge.second);
      i += 2;
    } else {
      out.push_back(syms[i++]);
    }
  }
  syms = std::move(out);
}

// Naive oracle: recount every adjacent pair from scratch each iteration.
std::vector<Merge> learn_oracle(const bpe::WordCounts& counts,
                                std::size_t num_merges,
                                const std::string& eow) {
  std::vector<std::pair<std::vector<std::string>, std::uint64_t>> words;
  for (const auto& [word, count] : counts)
    words.push_back({symbols_of(word, eow), count});
  std::vector<Merge> merges;
  for (std::size_t iter = 0; iter < num_merges; ++iter) {
    std::map<Merge, std::uint64_t> pair_counts;
    for (const auto& [syms, count] : words) {
      for (std::size_t i = 0; i + 1 < syms.size(); ++i)
        pair_counts[{syms[i], syms[i + 1]}] += count;
    }
    Merge best;
    std::uint64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best_count = count;
        best = pair;
      }
    }
    if (best_count < 2) break;
    merges.push_back(best);
    for (auto& [syms, count] : words) replace_all(syms, best);
  }
  return merges;
}

// In-order application oracle, checked against the rank-based fast path.
std::vector<std::string> apply_oracle(const BpeModel& model,
                                      const std::string& word) {
  auto syms = symbols_of(word, model.eow);
  for (const auto& merge : model.merges) replace_all(syms, merge);
  return syms;
}

}  // namespace

TEST_CASE("bpe learn on a single repeated word") {
  const bpe::WordCounts counts = {{"ab", 3}};
  const auto one = bpe::learn(counts, 1);
  REQUIRE(one.merges.size() == 1);
  CHECK(one.merges[0] == Merge{"a", "b"});

  const auto two = bpe::learn(counts, 2);
  REQUIRE(two.merges.size() == 2);
  CHECK(two.merges[1] == Merge{"ab", "</w>"});
  CHECK(two.vocab.count("ab</w>") == 1);
}

TEST_CASE("bpe learn stops early when the best pair count drops below 2") {
  const auto model = bpe::learn({{"aa", 1}}, 5);
  CHECK(model.merges.empty());

  // With count 2 the merges run until the word is a single symbol:
  // (a,</w>) wins the first tie lexicographically, then (a,a</w>).
  const auto model2 = bpe::learn({{"aa", 2}}, 5);
  REQUIRE(model2.merges.size() == 2);
  CHECK(model2.merges[0] == Merge{"a", "</w>"});
  CHECK(model2.merges[1] == Merge{"a", "a</w>"});
}

TEST_CASE("bpe learn ties go to the lexicographically smallest pair") {
  // All four pairs occur twice; (a,</w>) is smallest.
  const auto model = bpe::learn({{"ba", 2}, {"bc", 2}}, 1);
  REQUIRE(model.merges.size() == 1);
  CHECK(model.merges[0] == Merge{"a", "</w>"});
}

TEST_CASE("bpe learn rejects bad input") {
  CHECK_THROWS_AS(bpe::learn({{"", 1}}, 1), DataError);
  CHECK_THROWS_AS(bpe::learn({{"a", 0}}, 1), DataError);
  CHECK_THROWS_AS(bpe::learn({{"x</w>y", 1}}, 1), DataError);
}

TEST_CASE("bpe apply examples") {
  BpeModel model;
  model.merges = {{"a", "b"}};
  model.rebuild_vocab();
  CHECK(bpe::apply(model, "ab ab") ==
        std::vector<std::string>{"ab", "</w>", "ab", "</w>"});
  CHECK(bpe::apply(model, "").empty());
  CHECK(bpe::apply(model, "   ").empty());

  const BpeModel none;
  CHECK(bpe::apply(none, "hi") == std::vector<std::string>{"h", "i", "</w>"});
  CHECK(bpe::apply(none, "ሰላም") ==
        std::vector<std::string>{"ሰ", "ላ", "ም", "</w>"});
}

TEST_CASE("bpe apply equals in-order application") {
  std::mt19937 rng(17);
  const std::string alphabet = "abcd";
  for (int round = 0; round < 100; ++round) {
    bpe::WordCounts counts;
    const int words = 2 + rng() % 10;
    for (int w = 0; w < words; ++w) {
      std::string word;
      const int len = 1 + rng() % 6;
      for (int i = 0; i < len; ++i)
        word.push_back(alphabet[rng() % alphabet.size()]);
      counts[word] += 1 + rng() % 4;
    }
    const auto model = bpe::learn(counts, 1 + rng() % 20);
    for (const auto& [word, count] : counts) {
      CHECK(bpe::apply_word(model, word) == apply_oracle(model, word));
    }
  }
}

TEST_CASE("bpe decode examples") {
  CHECK(bpe::decode(std::vector<std::string>{"h", "i", "</w>"}) == "hi");
  CHECK(bpe::decode(std::vector<std::string>{}) == "");
  CHECK(bpe::decode(std::vector<std::string>{"ab</w>", "c", "</w>"}) ==
        "ab c");
}

TEST_CASE("bpe decode(apply(s)) recovers whitespace-normalized text") {
  const auto model = bpe::learn(
      {{"ሰላም", 4}, {"ዓለም", 3}, {"hello", 5}, {"ab", 6}}, 20);
  std::mt19937 rng(23);
  const std::vector<std::string> words = {"ሰላም", "ዓለም", "hello",
                                          "ab",  "ጤና",  "x1"};
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const int n = static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      for (unsigned s = 0; s < 1 + rng() % 3; ++s) text.push_back(' ');
      text += words[rng() % words.size()];
    }
    if (rng() % 2) text.push_back(' ');
    const auto tokens = bpe::apply(model, text);
    CHECK(bpe::decode(tokens) == utf8::normalize_whitespace(text));
  }
}

TEST_CASE("bpe learn matches the naive recount oracle on random corpora") {
  std::mt19937 rng(31);
  const std::vector<std::string> alphabet = {"a", "b", "c", "ሀ", "ሰ"};
  for (int round = 0; round < 60; ++round) {
    bpe::WordCounts counts;
    const int words = 1 + rng() % 20;
    for (int w = 0; w < words; ++w) {
      std::string word;
      const int len = 1 + rng() % 6;
      for (int i = 0; i < len; ++i) word += alphabet[rng() % alphabet.size()];
      counts[word] += 1 + rng() % 5;
    }
    const std::size_t merges = rng() % 31;
    const auto model = bpe::learn(counts, merges);
    CHECK(model.merges == learn_oracle(counts, merges, "</w>"));
  }
}

TEST_CASE("bpe token count is non-increasing in merge count") {
  const bpe::WordCounts counts = {{"ሰላም", 5}, {"ሰላሳ", 3}, {"ላምባ", 2},
                                  {"hello", 4}, {"help", 2}};
  const std::string text = "ሰላም ላምባ hello help ሰላሳ";
  std::size_t prev = SIZE_MAX;
  for (std::size_t merges = 0; merges <= 12; ++merges) {
    const auto model = bpe::learn(counts, merges);
    const std::size_t tokens = bpe::apply(model, text).size();
    CHECK(tokens <= prev);
    prev = tokens;
  }
}

TEST_CASE("bpe model file round trip") {
  testutil::TempDir tmp;
  const auto model = bpe::learn({{"ሰላም", 4}, {"ሰላሳ", 2}}, 6);
  REQUIRE(!model.merges.empty());
  const auto path = tmp.file("bpe.model");
  model.save(path);

  const std::string raw = testutil::read_file(path);
  CHECK(raw.rfind("#bpe v1 eow=</w>\n", 0) == 0);

  const auto loaded = BpeModel::load(path);
  CHECK(loaded.merges == model.merges);
  CHECK(loaded.eow == model.eow);
  CHECK(loaded.vocab == model.vocab);
}

TEST_CASE("bpe model file errors") {
  testutil::TempDir tmp;
  const auto path = tmp.file("bad.model");
  testutil::write_file(path, "not a header\n");
  CHECK_THROWS_AS(BpeModel::load(path), DataError);
  testutil::write_file(path, "#bpe v1 eow=</w>\nonlyoneword\n");
  CHECK_THROWS_AS(BpeModel::load(path), DataError);
  testutil::write_file(path, "#bpe v1 eow=</w>\na b c\n");
  CHECK_THROWS_AS(BpeModel::load(path), DataError);
}

TEST_CASE("bpe applier memoization matches apply") {
  const auto model = bpe::learn({{"ሰላም", 4}, {"ለሁሉ", 3}}, 8);
  bpe::Applier applier(model);
  const std::string line = "ሰላም ለሁሉ ሰላም";
  CHECK(applier.apply_line(line) == bpe::apply(model, line));
  CHECK(applier.apply_line(line) == bpe::apply(model, line));
}

TEST_CASE("bpe custom end-of-word marker") {
  const auto model = bpe::learn({{"ab", 3}}, 2, "@@");
  REQUIRE(model.merges.size() == 2);
  CHECK(model.merges[1] == Merge{"ab", "@@"});
  CHECK(bpe::decode(bpe::apply(model, "ab ab"), "@@") == "ab ab");
}
