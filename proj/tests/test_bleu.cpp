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

#include "ametk/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "ametk/error.hpp"
#include "ametk/utf8.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace ametk;
using bleu::corpus_bleu;
using bleu::EvalPair;
using bleu::EvalPairSet;

namespace {

EvalPair pair_of(const std::string& hyp,
                 const std::vector<std::string>& refs) {
  EvalPair p;
  p.hyp_tokens = utf8::split_words(hyp);
  for (const auto& r : refs) p.refs_tokens.push_back(utf8::split_words(r));
  return p;
}

// Brute-force oracle over vector<string> n-gram keys; no shared code with
// the implementation beyond token splitting.
double bleu_oracle(const EvalPairSet& pairs, std::size_t max_n) {
  std::vector<std::uint64_t> matched(max_n, 0), total(max_n, 0);
  std::uint64_t c = 0, r = 0;
  for (const auto& pair : pairs) {
    c += pair.hyp_tokens.size();
    std::size_t best = pair.refs_tokens[0].size();
    for (const auto& ref : pair.refs_tokens) {
      const auto d = [&](std::size_t l) {
        return l > pair.hyp_tokens.size() ? l - pair.hyp_tokens.size()
                                          : pair.hyp_tokens.size() - l;
      };
      if (d(ref.size()) < d(best) || (d(ref.size()) == d(best) && ref.size() < best))
        best = ref.size();
    }
    r += best;
    for (std::size_t n = 1; n <= max_n; ++n) {
      std::map<std::vector<std::string>, std::uint64_t> hyp_grams;
      for (std::size_t i = 0; i + n <= pair.hyp_tokens.size(); ++i) {
        hyp_grams[std::vector<std::string>(pair.hyp_tokens.begin() + i,
                                           pair.hyp_tokens.begin() + i + n)]++;
        ++total[n - 1];
      }
      for (const auto& [gram, count] : hyp_grams) {
        std::uint64_t clip = 0;
        for (const auto& ref : pair.refs_tokens) {
          std::uint64_t in_ref = 0;
          for (std::size_t i = 0; i + n <= ref.size(); ++i) {
            if (std::equal(gram.begin(), gram.end(), ref.begin() + i))
              ++in_ref;
          }
          clip = std::max(clip, in_ref);
        }
        matched[n - 1] += std::min(count, clip);
      }
    }
  }
  if (c == 0) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < max_n; ++n) {
    double p;
    if (total[n] == 0)
      p = 1.0;
    else
      p = static_cast<double>(matched[n]) / static_cast<double>(total[n]);
    if (p <= 0.0) return 0.0;
    log_sum += (1.0 / static_cast<double>(max_n)) * std::log(p);
  }
  const double bp =
      c > r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
  return bp * std::exp(log_sum);
}

}  // namespace

TEST_CASE("self-BLEU is exactly 1") {
  EvalPairSet pairs = {
      pair_of("the quick brown fox jumps", {"the quick brown fox jumps"}),
      pair_of("ሰላም ለዓለም ሁሉ ይሁን", {"ሰላም ለዓለም ሁሉ ይሁን"}),
      pair_of("hi", {"hi"})};
  const auto report = corpus_bleu(pairs);
  CHECK(report.bleu == 1.0);
  CHECK(report.brevity_penalty == 1.0);
  for (double p : report.precisions) CHECK(p == 1.0);
}

TEST_CASE("zero overlap gives zero BLEU") {
  EvalPairSet pairs = {pair_of("aa bb cc dd", {"xx yy zz ww"}),
                       pair_of("ee ff", {"qq rr"})};
  const auto report = corpus_bleu(pairs);
  CHECK(report.bleu == 0.0);
  CHECK(report.precisions[0] == 0.0);
}

TEST_CASE("clipped unigram precision is 2/7") {
  EvalPairSet pairs = {
      pair_of("the the the the the the the", {"the cat is on the mat"})};
  const auto report = corpus_bleu(pairs);
  CHECK(report.precisions[0] == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
  CHECK(report.matched[0] == 2);
  CHECK(report.totals[0] == 7);
}

TEST_CASE("brevity penalty on a one-token-short hypothesis") {
  EvalPairSet pairs = {
      pair_of("the cat is on the", {"the cat is on the mat"})};
  const auto report = corpus_bleu(pairs);
  CHECK(report.hyp_len == 5);
  CHECK(report.ref_len == 6);
  CHECK(report.brevity_penalty ==
        doctest::Approx(std::exp(1.0 - 6.0 / 5.0)).epsilon(1e-12));
}

TEST_CASE("BLEU equals BP times the weighted geometric mean") {
  EvalPairSet pairs = {
      pair_of("the cat is on the mat today", {"the cat is on the mat"}),
      pair_of("ሰላም ዓለም ነው", {"ሰላም ለዓለም ነው"})};
  const auto report = corpus_bleu(pairs);
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    REQUIRE(report.precisions[n] > 0.0);
    log_sum += report.weights[n] * std::log(report.precisions[n]);
  }
  CHECK(report.bleu ==
        doctest::Approx(report.brevity_penalty * std::exp(log_sum))
            .epsilon(1e-12));
}

TEST_CASE("corpus_bleu matches the brute-force oracle on random corpora") {
  std::mt19937 rng(12345);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "ሀ", "ሰ", "the"};
  const auto sentence = [&](int max_len) {
    std::string s;
    const int len = 1 + static_cast<int>(rng() % max_len);
    for (int i = 0; i < len; ++i) {
      if (i) s.push_back(' ');
      s += vocab[rng() % vocab.size()];
    }
    return s;
  };
  for (int round = 0; round < 40; ++round) {
    EvalPairSet pairs;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
      const int refs = 1 + static_cast<int>(rng() % 2);
      std::vector<std::string> ref_strs;
      for (int k = 0; k < refs; ++k) ref_strs.push_back(sentence(12));
      pairs.push_back(pair_of(sentence(12), ref_strs));
    }
    const auto report = corpus_bleu(pairs);
    CHECK(report.bleu == doctest::Approx(bleu_oracle(pairs, 4)).epsilon(1e-12));
  }
}

TEST_CASE("corpus BLEU is invariant under sentence permutation") {
  std::mt19937 rng(9);
  EvalPairSet pairs = {pair_of("a b c d", {"a b x d"}),
                       pair_of("ሀ ሰ ሀ", {"ሀ ሰ ለ"}),
                       pair_of("one two three four five", {"one two three"}),
                       pair_of("x", {"x y"})};
  const double before = corpus_bleu(pairs).bleu;
  for (int i = 0; i < 10; ++i) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    CHECK(corpus_bleu(pairs).bleu == before);
  }
}

TEST_CASE("appending a perfect pair never lowers BLEU when BP stays 1") {
  EvalPairSet pairs = {
      pair_of("the cat is on the mat today fine", {"the cat is on the mat"})};
  const auto base = corpus_bleu(pairs);
  REQUIRE(base.brevity_penalty == 1.0);
  REQUIRE(base.bleu > 0.0);
  pairs.push_back(pair_of("ሰላም ለዓለም ሁሉ ዛሬ", {"ሰላም ለዓለም ሁሉ ዛሬ"}));
  const auto extended = corpus_bleu(pairs);
  REQUIRE(extended.brevity_penalty == 1.0);
  CHECK(extended.bleu >= base.bleu);
}

TEST_CASE("degenerate and error cases") {
  CHECK_THROWS_AS(corpus_bleu({}), DataError);

  EvalPairSet no_ref = {EvalPair{{"a"}, {}}};
  CHECK_THROWS_AS(corpus_bleu(no_ref), DataError);

  EvalPairSet empty_hyps = {pair_of("", {"a b"}), pair_of("", {"c"})};
  const auto report = corpus_bleu(empty_hyps);
  CHECK(report.bleu == 0.0);
  CHECK(report.brevity_penalty == 0.0);
  CHECK(report.degenerate);

  CHECK_THROWS_AS(corpus_bleu({pair_of("a", {"a"})}, 4, {0.5, 0.5}),
                  UsageError);
  CHECK_THROWS_AS(corpus_bleu({pair_of("a", {"a"})}, 4, {0.5, 0.5, 0.5, 0.5}),
                  UsageError);
}

TEST_CASE("add-one smoothing applies to zero numerators above order 1") {
  // Unigram overlap only: p2 has a zero numerator.
  EvalPairSet pairs = {pair_of("b a", {"a b x"})};
  const auto plain = corpus_bleu(pairs);
  CHECK(plain.bleu == 0.0);
  CHECK(plain.precisions[1] == 0.0);

  const auto smoothed = corpus_bleu(pairs, 4, {}, bleu::Smoothing::add_one);
  CHECK(smoothed.precisions[0] == 1.0);  // 2/2, unsmoothed
  CHECK(smoothed.precisions[1] == doctest::Approx(1.0 / 2.0).epsilon(1e-12));
  CHECK(smoothed.bleu > 0.0);
  CHECK(smoothed.smoothing == bleu::Smoothing::add_one);
}

TEST_CASE("multiple references clip at the per-reference maximum") {
  EvalPairSet pairs = {
      pair_of("the the cat", {"the cat", "the the dog"})};
  const auto report = corpus_bleu(pairs);
  // "the" clips at 2 (second ref), "cat" matches the first.
  CHECK(report.matched[0] == 3);
  CHECK(report.totals[0] == 3);
}

TEST_CASE("effective reference length prefers closest then shorter") {
  // hyp 3 tokens; refs 2 and 4 tokens are equally close -> pick 2.
  EvalPairSet pairs = {pair_of("a b c", {"a b", "a b c d"})};
  CHECK(corpus_bleu(pairs).ref_len == 2);
  // refs 3 and 5: closest is 3.
  EvalPairSet pairs2 = {pair_of("a b c d", {"a b c", "a b c d e f"})};
  CHECK(corpus_bleu(pairs2).ref_len == 3);
}

TEST_CASE("report rendering") {
  EvalPairSet pairs = {
      pair_of("the cat is on the mat", {"the cat is on the mat"})};
  const auto report = corpus_bleu(pairs);
  const std::string human = report.human();
  CHECK(human.find("BLEU = 100.00") == 0);
  CHECK(human.find("BP = 1.0000") != std::string::npos);
  CHECK(human.find("ratio = 1.0000") != std::string::npos);
  const std::string tsv = report.to_tsv();
  CHECK(tsv.find("bleu\t100.00") != std::string::npos);
  CHECK(tsv.find("tokenizer\twhitespace") != std::string::npos);
}

TEST_CASE("compare_runs reports the delta in BLEU points") {
  bleu::BleuReport a, b;
  a.bleu = 0.3412;
  b.bleu = 0.3779;
  a.precisions = b.precisions = {0.7, 0.5, 0.3, 0.2};
  a.matched = b.matched = {1, 1, 1, 1};
  a.totals = b.totals = {2, 2, 2, 2};
  a.weights = b.weights = {0.25, 0.25, 0.25, 0.25};
  const auto record = bleu::compare_runs(a, b, "regular", "normalized");
  CHECK(record.delta_points == doctest::Approx(3.67).epsilon(1e-9));
  CHECK(record.human().find("+3.67") != std::string::npos);
  CHECK(record.to_tsv().find("normalized\t37.79") != std::string::npos);

  bleu::BleuReport c = a;
  c.bleu = 0.1478;
  bleu::BleuReport d = a;
  d.bleu = 0.1626;
  const auto record2 = bleu::compare_runs(c, d, "regular", "normalized");
  CHECK(record2.delta_points == doctest::Approx(1.48).epsilon(1e-9));

  const auto same = bleu::compare_runs(a, a, "x", "y");
  CHECK(same.delta_points == 0.0);

  bleu::BleuReport other = b;
  other.weights = {0.4, 0.3, 0.2, 0.1};
  CHECK_THROWS_AS(bleu::compare_runs(a, other, "x", "y"), UsageError);
}

TEST_CASE("load_pairs reads line-aligned files") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("hyp.txt"), "a b c\nd e\n");
  testutil::write_file(tmp.file("ref.txt"), "a b c\nd f\n");
  const std::vector<std::filesystem::path> refs = {tmp.file("ref.txt")};
  const auto pairs = bleu::load_pairs(tmp.file("hyp.txt"), refs);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].hyp_tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(pairs[1].refs_tokens[0] == std::vector<std::string>{"d", "f"});

  testutil::write_file(tmp.file("short.txt"), "one line\n");
  const std::vector<std::filesystem::path> bad = {tmp.file("short.txt")};
  CHECK_THROWS_AS(bleu::load_pairs(tmp.file("hyp.txt"), bad), DataError);
}
