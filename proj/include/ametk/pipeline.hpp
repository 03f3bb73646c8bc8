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

// End-to-end orchestration: manifest in, cleaned/normalized/deduplicated
// corpus variants, split sets, BPE models, and a reproducible run record
// out. Identical config and inputs give byte-identical outputs.

#ifndef AMETK_PIPELINE_HPP_
#define AMETK_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ametk/corpus.hpp"
#include "ametk/textclean.hpp"

namespace ametk::pipeline {

// Canonical stage order; enabled stages must form a subsequence of it.
enum class Stage { clean, expand, normalize, dedup, split, bpe };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);

enum class NormalizationMode { off, fixed, learned };

struct BpeSettings {
  std::size_t merges = 32000;
  bool joint = false;  // one model over both sides vs. one per side
  std::string eow = "</w>";
};

struct PipelineConfig {
  std::filesystem::path manifest;
  std::filesystem::path output_dir;
  std::vector<Stage> stages;
  NormalizationMode normalization = NormalizationMode::fixed;
  bool dedup_before_normalize = false;
  corpus::DedupMode dedup_mode = corpus::DedupMode::digest;
  textclean::CleanOptions clean;
  textclean::FilterRules filter;
  std::filesystem::path am_lexicon;  // optional
  std::filesystem::path en_lexicon;  // optional
  std::filesystem::path table_path;  // optional fixed-table override
  corpus::SplitSpec split;
  BpeSettings bpe;
  bool write_intermediate = false;
  bool strict_counts = false;
  bool quiet = false;

  // Flat `key = value` file with `[section]` headers; relative paths resolve
  // against the config file's directory.
  static PipelineConfig load(const std::filesystem::path& path);
  static PipelineConfig parse(std::string_view text,
                              const std::filesystem::path& base_dir,
                              const std::string& name = "<config>");
  void validate() const;

  // Canonical serialization, embedded in the run record.
  std::string to_text() const;
};

struct StageCounts {
  std::string stage;
  std::uint64_t in = 0;
  std::uint64_t out = 0;
  std::uint64_t dropped = 0;
};

struct RunRecord {
  std::string version;
  std::string config_text;
  std::map<std::string, std::string> input_digests;  // path -> fnv64 hex
  std::vector<StageCounts> stages;  // execution order
  std::uint64_t seed = 0;
  std::string started_at, finished_at;  // UTC, ISO-8601
  std::string failed_stage;  // empty on success
  std::vector<std::string> warnings;

  std::string to_text() const;
};

// Executes the enabled stages in canonical order (abbreviation expansion
// runs inside the cleaning pass, before lowercasing; dedup_before_normalize
// swaps those two stages). Writes outputs and run_record.txt under
// output_dir; on stage failure writes a partial record naming the stage and
// rethrows.
RunRecord run(const PipelineConfig& config, std::ostream* log = nullptr);

// FNV-1a 64 over a file's bytes, as 16 hex digits.
std::string file_digest(const std::filesystem::path& path);

}  // namespace ametk::pipeline

#endif  // AMETK_PIPELINE_HPP_
