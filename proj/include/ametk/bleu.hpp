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

// Corpus-level BLEU: geometric mean of modified (clipped) n-gram precisions
// times a brevity penalty, over whitespace-tokenized text.

#ifndef AMETK_BLEU_HPP_
#define AMETK_BLEU_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ametk::bleu {

enum class Smoothing { none, add_one };

std::string_view to_string(Smoothing mode);

struct BleuReport {
  double bleu = 0.0;  // in [0, 1]; rendered x100 in reports
  std::vector<double> precisions;        // p1..p_max_n
  std::vector<std::uint64_t> matched;    // clipped matches per order
  std::vector<std::uint64_t> totals;     // hypothesis n-grams per order
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;  // c: total hypothesis tokens
  std::uint64_t ref_len = 0;  // r: total effective reference tokens
  std::vector<double> weights;
  Smoothing smoothing = Smoothing::none;
  bool degenerate = false;  // all hypotheses empty (c == 0, BP pinned to 0)

  // `BLEU = 37.79, p1/p2/p3/p4 = 70.12/45.33/30.01/20.55, BP = 0.987,
  //  ratio = 0.987, hyp_len = 1537, ref_len = 1557`
  std::string human() const;
  std::string to_tsv() const;
};

struct EvalPair {
  std::vector<std::string> hyp_tokens;
  std::vector<std::vector<std::string>> refs_tokens;  // at least one
};
using EvalPairSet = std::vector<EvalPair>;

// Reads line-aligned tokenized files (one sentence per line); every
// reference file must match the hypothesis line count.
EvalPairSet load_pairs(const std::filesystem::path& hyp_path,
                       std::span<const std::filesystem::path> ref_paths);

// Modified n-gram precisions with per-reference clipping; the effective
// reference length per sentence is the closest to the hypothesis length
// (ties to shorter). Empty weights mean uniform 1/max_n. add_one smoothing
// replaces a zero numerator with (1)/(total+1) for n >= 2 only.
BleuReport corpus_bleu(const EvalPairSet& pairs, std::size_t max_n = 4,
                       std::vector<double> weights = {},
                       Smoothing smoothing = Smoothing::none);

struct ComparisonRecord {
  std::string label_a, label_b;
  BleuReport a, b;
  double delta_points = 0.0;  // (b.bleu - a.bleu) * 100

  std::string human() const;
  std::string to_tsv() const;
};

// Two-column comparison of runs scored with identical settings.
ComparisonRecord compare_runs(const BleuReport& a, const BleuReport& b,
                              std::string label_a, std::string label_b);

}  // namespace ametk::bleu

#endif  // AMETK_BLEU_HPP_
