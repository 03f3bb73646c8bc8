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

#include "ametk/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ametk/error.hpp"
#include "ametk/ethiopic.hpp"
#include "ametk/utf8.hpp"

namespace ametk::corpus {

namespace {

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::uint64_t parse_u64(std::string_view field, const std::string& where) {
  std::uint64_t value = 0;
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw DataError(where + ": expected an unsigned integer, got '" +
                    std::string(field) + "'");
  return value;
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  return p.is_absolute() ? p : base / p;
}

// Two independent 64-bit FNV-1a passes over a length-prefixed encoding of
// the key. Collisions are treated as duplicates; that is a one-in-2^64-scale
// approximation, with exact mode available for small corpora.
std::pair<std::uint64_t, std::uint64_t> pair_digest(std::string_view source,
                                                    std::string_view target) {
  constexpr std::uint64_t kPrime = 0x100000001B3ULL;
  std::uint64_t h1 = 0xCBF29CE484222325ULL;
  std::uint64_t h2 = 0x6C62272E07BB0142ULL;
  const auto mix = [&](unsigned char byte) {
    h1 = (h1 ^ byte) * kPrime;
    h2 = (h2 ^ byte) * 0x00000100000001B3ULL ^ (h2 >> 47);
    h2 *= kPrime;
  };
  std::uint64_t len = source.size();
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(len >> (8 * i)));
  for (char c : source) mix(static_cast<unsigned char>(c));
  for (char c : target) mix(static_cast<unsigned char>(c));
  return {h1, h2};
}

}  // namespace

CorpusManifest CorpusManifest::parse(std::string_view text,
                                     const std::filesystem::path& base_dir,
                                     const std::string& name) {
  CorpusManifest manifest;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = name + ":" + std::to_string(line_no);
    const auto fields = split_tabs(line);
    if (fields.size() < 3)
      throw DataError(where + ": expected origin, format, and source path");
    ManifestEntry entry;
    entry.origin = fields[0];
    if (entry.origin.empty()) throw DataError(where + ": empty origin id");
    std::size_t next = 3;
    if (fields[1] == "two-file-aligned") {
      entry.format = SourceFormat::two_file_aligned;
      if (fields.size() < 4)
        throw DataError(where + ": two-file-aligned needs a target path");
      entry.source_path = resolve(base_dir, fields[2]);
      entry.target_path = resolve(base_dir, fields[3]);
      next = 4;
    } else if (fields[1] == "tsv") {
      entry.format = SourceFormat::tsv;
      entry.source_path = resolve(base_dir, fields[2]);
    } else {
      throw DataError(where + ": unknown format '" + fields[1] +
                      "' (expected two-file-aligned or tsv)");
    }
    if (fields.size() > next) {
      entry.declared_count = parse_u64(fields[next], where);
      ++next;
    }
    if (fields.size() > next)
      throw DataError(where + ": trailing fields");
    manifest.entries.push_back(std::move(entry));
  }
  manifest.validate();
  return manifest;
}

CorpusManifest CorpusManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path(), path.string());
}

void CorpusManifest::validate() const {
  std::set<std::string> origins;
  for (const auto& entry : entries) {
    if (!origins.insert(entry.origin).second)
      throw DataError("duplicate origin id in manifest: " + entry.origin);
  }
}

std::optional<std::uint64_t> CorpusManifest::declared_total() const {
  std::optional<std::uint64_t> total;
  for (const auto& entry : entries) {
    if (entry.declared_count)
      total = total.value_or(0) + *entry.declared_count;
  }
  return total;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

void write_lines(std::span<const std::string> lines,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  for (const auto& line : lines) out << line << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<std::string> ingest(const CorpusManifest& manifest,
                                const PairSink& sink,
                                const IngestOptions& opts) {
  manifest.validate();
  std::vector<std::string> warnings;
  for (const auto& entry : manifest.entries) {
    std::uint64_t emitted = 0;
    if (entry.format == SourceFormat::two_file_aligned) {
      const auto source_lines = read_lines(entry.source_path);
      const auto target_lines = read_lines(entry.target_path);
      if (source_lines.size() != target_lines.size())
        throw DataError("alignment error in origin '" + entry.origin + "': " +
                        std::to_string(source_lines.size()) + " vs " +
                        std::to_string(target_lines.size()) + " lines");
      for (std::size_t i = 0; i < source_lines.size(); ++i) {
        sink({source_lines[i], target_lines[i], entry.origin, i + 1});
        ++emitted;
      }
    } else {
      const auto lines = read_lines(entry.source_path);
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto tab = lines[i].find('\t');
        if (tab == std::string::npos)
          throw DataError("origin '" + entry.origin + "' line " +
                          std::to_string(i + 1) +
                          ": expected source\\ttarget");
        sink({lines[i].substr(0, tab), lines[i].substr(tab + 1), entry.origin,
              i + 1});
        ++emitted;
      }
    }
    if (entry.declared_count && *entry.declared_count != emitted) {
      const std::string message =
          "origin '" + entry.origin + "': declared " +
          std::to_string(*entry.declared_count) + " pairs, read " +
          std::to_string(emitted);
      if (opts.strict_counts) throw DataError(message);
      warnings.push_back(message);
    }
  }
  return warnings;
}

std::vector<SentencePair> ingest_all(const CorpusManifest& manifest,
                                     const IngestOptions& opts,
                                     std::vector<std::string>* warnings) {
  std::vector<SentencePair> pairs;
  auto w = ingest(
      manifest, [&pairs](SentencePair&& p) { pairs.push_back(std::move(p)); },
      opts);
  if (warnings != nullptr) *warnings = std::move(w);
  return pairs;
}

bool DedupFilter::insert(const SentencePair& pair) {
  ++seen_;
  bool first;
  if (mode_ == DedupMode::exact) {
    first = keys_.emplace(pair.source, pair.target).second;
  } else {
    first = digests_.insert(pair_digest(pair.source, pair.target)).second;
  }
  if (!first) ++dropped_;
  return first;
}

DedupResult dedup(std::vector<SentencePair> pairs, DedupMode mode) {
  DedupFilter filter(mode);
  DedupResult result;
  result.pairs.reserve(pairs.size());
  for (auto& pair : pairs) {
    if (filter.insert(pair)) result.pairs.push_back(std::move(pair));
  }
  result.dropped = filter.dropped();
  return result;
}

Fraction Fraction::normalized() const {
  if (num == 0) return {0, 1};
  const std::uint64_t g = std::gcd(num, den);
  return {num / g, den / g};
}

Fraction Fraction::parse(std::string_view text) {
  const std::string where = "fraction '" + std::string(text) + "'";
  if (text.empty()) throw UsageError(where + ": empty");
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    const std::uint64_t num = parse_u64(text.substr(0, slash), where);
    const std::uint64_t den = parse_u64(text.substr(slash + 1), where);
    if (den == 0) throw UsageError(where + ": zero denominator");
    return Fraction{num, den}.normalized();
  }
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    return Fraction{parse_u64(text, where), 1};
  }
  const std::string_view int_part = text.substr(0, dot);
  const std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.size() > 18) throw UsageError(where + ": too many digits");
  std::uint64_t den = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) den *= 10;
  const std::uint64_t whole = int_part.empty() ? 0 : parse_u64(int_part, where);
  const std::uint64_t frac =
      frac_part.empty() ? 0 : parse_u64(frac_part, where);
  return Fraction{whole * den + frac, den}.normalized();
}

void SplitSpec::validate() const {
  for (const auto* f : {&train, &valid, &test}) {
    if (f->num == 0 || f->den == 0)
      throw UsageError("split fractions must be positive");
  }
  // Exact rational sum check.
  using u128 = unsigned __int128;
  const u128 lhs = u128(train.num) * valid.den * test.den +
                   u128(valid.num) * train.den * test.den +
                   u128(test.num) * train.den * valid.den;
  const u128 rhs = u128(train.den) * valid.den * test.den;
  if (lhs != rhs)
    throw UsageError("split fractions must sum to exactly 1");
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::uint64_t state = seed;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(splitmix64_next(state) % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

SplitResult split(std::span<const SentencePair> pairs, const SplitSpec& spec) {
  spec.validate();
  const std::size_t n = pairs.size();
  if (n < 3)
    throw DataError("cannot split " + std::to_string(n) +
                    " pairs into three sets");
  using u128 = unsigned __int128;
  const auto floor_of = [n](const Fraction& f) {
    return static_cast<std::size_t>(u128(n) * f.num / f.den);
  };
  const std::size_t test_n = floor_of(spec.test);
  const std::size_t valid_n = floor_of(spec.valid);
  const std::size_t train_n = n - test_n - valid_n;

  const auto idx = shuffled_indices(n, spec.seed);
  SplitResult result;
  result.train.reserve(train_n);
  result.valid.reserve(valid_n);
  result.test.reserve(test_n);
  for (std::size_t i = 0; i < train_n; ++i)
    result.train.push_back(pairs[idx[i]]);
  for (std::size_t i = train_n; i < train_n + valid_n; ++i)
    result.valid.push_back(pairs[idx[i]]);
  for (std::size_t i = train_n + valid_n; i < n; ++i)
    result.test.push_back(pairs[idx[i]]);
  return result;
}

CorpusStats stats(std::span<const SentencePair> pairs) {
  CorpusStats s;
  DedupFilter unique_filter(DedupMode::digest);
  for (const auto& pair : pairs) {
    ++s.total;
    ++s.per_origin[pair.origin];
    if (unique_filter.insert(pair)) ++s.unique;
    s.source_tokens += utf8::split_words(pair.source).size();
    s.target_tokens += utf8::split_words(pair.target).size();
    for (char32_t cp : utf8::decode(pair.source)) {
      if (ethiopic::is_ethiopic(cp)) ++s.source_chars[cp];
    }
  }
  return s;
}

std::string CorpusStats::to_tsv() const {
  std::ostringstream out;
  out << "[pairs]\n";
  for (const auto& [origin, count] : per_origin)
    out << origin << '\t' << count << '\n';
  out << "total\t" << total << '\n';
  out << "unique\t" << unique << '\n';
  out << "[tokens]\n";
  out << "source\t" << source_tokens << '\n';
  out << "target\t" << target_tokens << '\n';
  out << "[source_chars]\n";
  for (const auto& [cp, count] : source_chars) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04X", static_cast<unsigned>(cp));
    out << buf << '\t' << count << '\n';
  }
  return out.str();
}

void write_aligned(std::span<const SentencePair> pairs,
                   const std::filesystem::path& source_path,
                   const std::filesystem::path& target_path) {
  std::ofstream src(source_path, std::ios::binary);
  std::ofstream tgt(target_path, std::ios::binary);
  if (!src) throw DataError("cannot write file: " + source_path.string());
  if (!tgt) throw DataError("cannot write file: " + target_path.string());
  for (const auto& pair : pairs) {
    src << pair.source << '\n';
    tgt << pair.target << '\n';
  }
  if (!src) throw DataError("write failed: " + source_path.string());
  if (!tgt) throw DataError("write failed: " + target_path.string());
}

void write_tsv(std::span<const SentencePair> pairs,
               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  for (const auto& pair : pairs) out << pair.source << '\t' << pair.target << '\n';
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<SentencePair> read_aligned(const std::filesystem::path& source_path,
                                       const std::filesystem::path& target_path,
                                       const std::string& origin) {
  CorpusManifest manifest;
  manifest.entries.push_back(
      {origin, SourceFormat::two_file_aligned, source_path, target_path, {}});
  return ingest_all(manifest);
}

std::vector<SentencePair> read_tsv(const std::filesystem::path& path,
                                   const std::string& origin) {
  CorpusManifest manifest;
  manifest.entries.push_back({origin, SourceFormat::tsv, path, {}, {}});
  return ingest_all(manifest);
}

}  // namespace ametk::corpus
