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

// Parallel corpus bookkeeping: manifest-driven ingestion, exact-pair
// deduplication, deterministic seeded splitting, and statistics.

#ifndef AMETK_CORPUS_HPP_
#define AMETK_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ametk::corpus {

struct SentencePair {
  std::string source;  // Amharic side
  std::string target;  // English side
  std::string origin;  // manifest source key
  std::uint64_t line_no = 0;  // 1-based position within the source

  friend bool operator==(const SentencePair&, const SentencePair&) = default;
};

enum class SourceFormat { two_file_aligned, tsv };

struct ManifestEntry {
  std::string origin;
  SourceFormat format = SourceFormat::two_file_aligned;
  std::filesystem::path source_path;
  std::filesystem::path target_path;  // two-file-aligned only
  std::optional<std::uint64_t> declared_count;
};

// Manifest file: UTF-8 TSV, one entry per line:
//   origin_id \t format \t source_path [\t target_path] [\t declared_count]
// format is "two-file-aligned" or "tsv"; relative paths resolve against the
// manifest's directory.
struct CorpusManifest {
  std::vector<ManifestEntry> entries;

  static CorpusManifest load(const std::filesystem::path& path);
  static CorpusManifest parse(std::string_view text,
                              const std::filesystem::path& base_dir,
                              const std::string& name = "<manifest>");

  void validate() const;  // unique origins

  // Sum of declared counts; nullopt when no entry declares one.
  std::optional<std::uint64_t> declared_total() const;
};

struct IngestOptions {
  bool strict_counts = false;  // declared-count mismatch: warn vs. error
};

using PairSink = std::function<void(SentencePair&&)>;

// Reads every manifest source in order, attaching origin and 1-based line
// numbers. Returns count-mismatch warnings (unless strict, which throws).
std::vector<std::string> ingest(const CorpusManifest& manifest,
                                const PairSink& sink,
                                const IngestOptions& opts = {});
std::vector<SentencePair> ingest_all(const CorpusManifest& manifest,
                                     const IngestOptions& opts = {},
                                     std::vector<std::string>* warnings = nullptr);

// First occurrence (in stream order) of each exact (source, target) key
// wins. digest mode keeps only a 128-bit key hash per pair; exact mode keeps
// the full keys.
enum class DedupMode { digest, exact };

class DedupFilter {
 public:
  explicit DedupFilter(DedupMode mode = DedupMode::digest) : mode_(mode) {}

  // True when the pair is its key's first occurrence.
  bool insert(const SentencePair& pair);

  std::uint64_t seen() const { return seen_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  DedupMode mode_;
  std::uint64_t seen_ = 0;
  std::uint64_t dropped_ = 0;
  std::set<std::pair<std::uint64_t, std::uint64_t>> digests_;
  std::set<std::pair<std::string, std::string>> keys_;
};

struct DedupResult {
  std::vector<SentencePair> pairs;
  std::uint64_t dropped = 0;
};
DedupResult dedup(std::vector<SentencePair> pairs,
                  DedupMode mode = DedupMode::digest);

// Exact rational, used so split fractions can sum to exactly 1.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  // Accepts "a/b" or decimal ("0.8").
  static Fraction parse(std::string_view text);
  Fraction normalized() const;
  friend bool operator==(const Fraction& a, const Fraction& b) {
    return a.num * b.den == b.num * a.den;
  }
};

struct SplitSpec {
  Fraction train{4, 5};
  Fraction valid{1, 10};
  Fraction test{1, 10};
  std::uint64_t seed = 1;

  void validate() const;  // positive fractions, exact sum 1
};

struct SplitResult {
  std::vector<SentencePair> train, valid, test;
};

// Deterministic shuffle (SplitMix64-keyed Fisher-Yates over the index
// array), then test = floor(N*test), valid = floor(N*valid), train =
// remainder. Same seed and input give identical output.
SplitResult split(std::span<const SentencePair> pairs, const SplitSpec& spec);

// Fixed PRNG so partitions are portable: SplitMix64 stepped from the raw
// seed. Exposed for tests and reimplementations.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

struct CorpusStats {
  std::uint64_t total = 0;
  std::map<std::string, std::uint64_t> per_origin;
  std::uint64_t unique = 0;
  std::uint64_t source_tokens = 0;
  std::uint64_t target_tokens = 0;
  // Every Ethiopic code point seen on the source side; feeds learned
  // normalization.
  std::map<char32_t, std::uint64_t> source_chars;

  std::string to_tsv() const;
};
CorpusStats stats(std::span<const SentencePair> pairs);

// Two-file-aligned and TSV corpus i/o. Writers emit `\n` line ends, no BOM.
void write_aligned(std::span<const SentencePair> pairs,
                   const std::filesystem::path& source_path,
                   const std::filesystem::path& target_path);
void write_tsv(std::span<const SentencePair> pairs,
               const std::filesystem::path& path);
std::vector<SentencePair> read_aligned(const std::filesystem::path& source_path,
                                       const std::filesystem::path& target_path,
                                       const std::string& origin = "corpus");
std::vector<SentencePair> read_tsv(const std::filesystem::path& path,
                                   const std::string& origin = "corpus");
std::vector<std::string> read_lines(const std::filesystem::path& path);
void write_lines(std::span<const std::string> lines,
                 const std::filesystem::path& path);

}  // namespace ametk::corpus

#endif  // AMETK_CORPUS_HPP_
