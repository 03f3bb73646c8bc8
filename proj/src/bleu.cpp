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

#include <cmath>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "ametk/corpus.hpp"
#include "ametk/error.hpp"
#include "ametk/utf8.hpp"

namespace ametk::bleu {

namespace {

// Tokens are whitespace-delimited, so joining with a space is injective for
// a fixed n.
std::string ngram_key(std::span<const std::string> tokens, std::size_t start,
                      std::size_t n) {
  std::string key = tokens[start];
  for (std::size_t i = 1; i < n; ++i) {
    key.push_back(' ');
    key += tokens[start + i];
  }
  return key;
}

std::unordered_map<std::string, std::uint64_t> ngram_counts(
    std::span<const std::string> tokens, std::size_t n) {
  std::unordered_map<std::string, std::uint64_t> counts;
  if (tokens.size() >= n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i)
      ++counts[ngram_key(tokens, i, n)];
  }
  return counts;
}

std::string format2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

std::string format4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", x);
  return buf;
}

}  // namespace

std::string_view to_string(Smoothing mode) {
  return mode == Smoothing::none ? "none" : "add-one";
}

EvalPairSet load_pairs(const std::filesystem::path& hyp_path,
                       std::span<const std::filesystem::path> ref_paths) {
  if (ref_paths.empty()) throw DataError("at least one reference file required");
  const auto hyp_lines = corpus::read_lines(hyp_path);
  std::vector<std::vector<std::string>> ref_lines;
  for (const auto& path : ref_paths) {
    ref_lines.push_back(corpus::read_lines(path));
    if (ref_lines.back().size() != hyp_lines.size())
      throw DataError("reference " + path.string() + " has " +
                      std::to_string(ref_lines.back().size()) +
                      " lines, hypothesis has " +
                      std::to_string(hyp_lines.size()));
  }
  EvalPairSet pairs(hyp_lines.size());
  for (std::size_t i = 0; i < hyp_lines.size(); ++i) {
    pairs[i].hyp_tokens = utf8::split_words(hyp_lines[i]);
    for (const auto& lines : ref_lines)
      pairs[i].refs_tokens.push_back(utf8::split_words(lines[i]));
  }
  return pairs;
}

BleuReport corpus_bleu(const EvalPairSet& pairs, std::size_t max_n,
                       std::vector<double> weights, Smoothing smoothing) {
  if (pairs.empty()) throw DataError("empty evaluation set");
  if (max_n == 0) throw UsageError("max_n must be positive");
  if (weights.empty())
    weights.assign(max_n, 1.0 / static_cast<double>(max_n));
  if (weights.size() != max_n)
    throw UsageError("need one weight per n-gram order");
  double weight_sum = 0.0;
  for (double w : weights) {
    if (w <= 0.0) throw UsageError("weights must be positive");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw UsageError("weights must sum to 1");

  BleuReport report;
  report.matched.assign(max_n, 0);
  report.totals.assign(max_n, 0);
  report.weights = weights;
  report.smoothing = smoothing;

  for (const auto& pair : pairs) {
    if (pair.refs_tokens.empty())
      throw DataError("every hypothesis needs at least one reference");
    const std::size_t hyp_len = pair.hyp_tokens.size();
    report.hyp_len += hyp_len;

    // Closest reference length; ties go to the shorter one.
    std::size_t best_len = pair.refs_tokens.front().size();
    for (const auto& ref : pair.refs_tokens) {
      const std::size_t len = ref.size();
      const auto dist = [hyp_len](std::size_t l) {
        return l > hyp_len ? l - hyp_len : hyp_len - l;
      };
      if (dist(len) < dist(best_len) ||
          (dist(len) == dist(best_len) && len < best_len))
        best_len = len;
    }
    report.ref_len += best_len;

    for (std::size_t n = 1; n <= max_n; ++n) {
      if (hyp_len < n) break;
      report.totals[n - 1] += hyp_len - n + 1;
      const auto hyp_counts = ngram_counts(pair.hyp_tokens, n);
      std::unordered_map<std::string, std::uint64_t> ref_max;
      for (const auto& ref : pair.refs_tokens) {
        for (const auto& [gram, count] : ngram_counts(ref, n)) {
          auto& slot = ref_max[gram];
          slot = std::max(slot, count);
        }
      }
      for (const auto& [gram, count] : hyp_counts) {
        const auto it = ref_max.find(gram);
        if (it != ref_max.end())
          report.matched[n - 1] += std::min(count, it->second);
      }
    }
  }

  report.precisions.assign(max_n, 0.0);
  for (std::size_t n = 1; n <= max_n; ++n) {
    const std::uint64_t matched = report.matched[n - 1];
    const std::uint64_t total = report.totals[n - 1];
    if (smoothing == Smoothing::add_one && n >= 2 && matched == 0) {
      report.precisions[n - 1] = 1.0 / static_cast<double>(total + 1);
    } else if (total == 0) {
      // No hypothesis n-grams at this order (every sentence shorter than n):
      // the order is vacuous and must not zero the score, or self-BLEU on
      // short sentences would not be 1.
      report.precisions[n - 1] = 1.0;
    } else {
      report.precisions[n - 1] =
          static_cast<double>(matched) / static_cast<double>(total);
    }
  }

  if (report.hyp_len == 0) {
    // All hypotheses empty: pin BP to 0 and flag it.
    report.degenerate = true;
    report.brevity_penalty = 0.0;
    report.bleu = 0.0;
    return report;
  }
  report.brevity_penalty =
      report.hyp_len > report.ref_len
          ? 1.0
          : std::exp(1.0 - static_cast<double>(report.ref_len) /
                               static_cast<double>(report.hyp_len));

  double log_sum = 0.0;
  bool any_zero = false;
  for (std::size_t n = 0; n < max_n; ++n) {
    if (report.precisions[n] <= 0.0) {
      any_zero = true;
      break;
    }
    log_sum += weights[n] * std::log(report.precisions[n]);
  }
  report.bleu = any_zero ? 0.0 : report.brevity_penalty * std::exp(log_sum);
  return report;
}

std::string BleuReport::human() const {
  std::ostringstream out;
  out << "BLEU = " << format2(bleu * 100.0) << ", ";
  for (std::size_t n = 0; n < precisions.size(); ++n)
    out << 'p' << (n + 1) << (n + 1 < precisions.size() ? "/" : " = ");
  for (std::size_t n = 0; n < precisions.size(); ++n) {
    out << format2(precisions[n] * 100.0)
        << (n + 1 < precisions.size() ? "/" : "");
  }
  const double ratio = hyp_len == 0 || ref_len == 0
                           ? 0.0
                           : static_cast<double>(hyp_len) /
                                 static_cast<double>(ref_len);
  out << ", BP = " << format4(brevity_penalty) << ", ratio = " << format4(ratio)
      << ", hyp_len = " << hyp_len << ", ref_len = " << ref_len;
  if (degenerate) out << " (degenerate: empty hypotheses)";
  return out.str();
}

std::string BleuReport::to_tsv() const {
  std::ostringstream out;
  out << "bleu\t" << format2(bleu * 100.0) << '\n';
  for (std::size_t n = 0; n < precisions.size(); ++n) {
    out << 'p' << (n + 1) << '\t' << format2(precisions[n] * 100.0) << '\t'
        << matched[n] << '/' << totals[n] << '\n';
  }
  out << "bp\t" << format4(brevity_penalty) << '\n';
  out << "hyp_len\t" << hyp_len << '\n';
  out << "ref_len\t" << ref_len << '\n';
  out << "smoothing\t" << to_string(smoothing) << '\n';
  out << "tokenizer\twhitespace\n";
  return out.str();
}

ComparisonRecord compare_runs(const BleuReport& a, const BleuReport& b,
                              std::string label_a, std::string label_b) {
  if (a.precisions.size() != b.precisions.size())
    throw UsageError("cannot compare runs scored with different max n-gram order");
  if (a.weights != b.weights)
    throw UsageError("cannot compare runs scored with different weights");
  if (a.smoothing != b.smoothing)
    throw UsageError("cannot compare runs scored with different smoothing");
  ComparisonRecord record;
  record.label_a = std::move(label_a);
  record.label_b = std::move(label_b);
  record.a = a;
  record.b = b;
  record.delta_points = (b.bleu - a.bleu) * 100.0;
  return record;
}

std::string ComparisonRecord::human() const {
  std::ostringstream out;
  const auto row = [&out](const std::string& label, const BleuReport& r) {
    out << label << ": BLEU = " << format2(r.bleu * 100.0) << " (";
    for (std::size_t n = 0; n < r.precisions.size(); ++n) {
      out << format2(r.precisions[n] * 100.0)
          << (n + 1 < r.precisions.size() ? "/" : "");
    }
    out << ", BP = " << format4(r.brevity_penalty) << ")\n";
  };
  row(label_a, a);
  row(label_b, b);
  out << "delta: " << (delta_points >= 0 ? "+" : "") << format2(delta_points)
      << " BLEU points (" << label_b << " - " << label_a << ")\n";
  return out.str();
}

std::string ComparisonRecord::to_tsv() const {
  std::ostringstream out;
  out << "system\tbleu";
  for (std::size_t n = 0; n < a.precisions.size(); ++n)
    out << "\tp" << (n + 1);
  out << "\tbp\thyp_len\tref_len\n";
  const auto row = [&out](const std::string& label, const BleuReport& r) {
    out << label << '\t' << format2(r.bleu * 100.0);
    for (double p : r.precisions) out << '\t' << format2(p * 100.0);
    out << '\t' << format4(r.brevity_penalty) << '\t' << r.hyp_len << '\t'
        << r.ref_len << '\n';
  };
  row(label_a, a);
  row(label_b, b);
  out << "delta\t" << (delta_points >= 0 ? "+" : "") << format2(delta_points)
      << '\n';
  return out.str();
}

}  // namespace ametk::bleu
