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

#include "ametk/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "ametk/bpe.hpp"
#include "ametk/error.hpp"
#include "ametk/ethiopic.hpp"
#include "ametk/utf8.hpp"
#include "ametk/version.hpp"

namespace ametk::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr Stage kCanonicalOrder[] = {Stage::clean,     Stage::expand,
                                     Stage::normalize, Stage::dedup,
                                     Stage::split,     Stage::bpe};

std::string now_utc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view to_string(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::off:
      return "off";
    case NormalizationMode::fixed:
      return "fixed";
    case NormalizationMode::learned:
      return "learned";
  }
  return "off";
}

NormalizationMode normalization_from_string(std::string_view name) {
  if (name == "off") return NormalizationMode::off;
  if (name == "fixed") return NormalizationMode::fixed;
  if (name == "learned") return NormalizationMode::learned;
  throw UsageError("unknown normalization mode '" + std::string(name) + "'");
}

bool parse_bool(std::string_view value, const std::string& where) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw UsageError(where + ": expected true or false, got '" +
                   std::string(value) + "'");
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::clean:
      return "clean";
    case Stage::expand:
      return "expand";
    case Stage::normalize:
      return "normalize";
    case Stage::dedup:
      return "dedup";
    case Stage::split:
      return "split";
    case Stage::bpe:
      return "bpe";
  }
  return "unknown";
}

Stage stage_from_string(std::string_view name) {
  for (Stage stage : kCanonicalOrder) {
    if (to_string(stage) == name) return stage;
  }
  throw UsageError("unknown stage '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (manifest.empty()) throw UsageError("config needs a manifest path");
  if (output_dir.empty()) throw UsageError("config needs an output directory");
  // Enabled stages must be a subsequence of the canonical order.
  std::size_t cursor = 0;
  for (Stage stage : stages) {
    const auto* begin = std::begin(kCanonicalOrder);
    const auto* end = std::end(kCanonicalOrder);
    const auto* it = std::find(begin + cursor, end, stage);
    if (it == end)
      throw UsageError("stage list must follow the order "
                       "clean,expand,normalize,dedup,split,bpe "
                       "without repeats");
    cursor = static_cast<std::size_t>(it - begin) + 1;
  }
  filter.validate();
  split.validate();
  if (bpe.eow.empty()) throw UsageError("bpe end-of-word marker must not be empty");
}

PipelineConfig PipelineConfig::parse(std::string_view text,
                                     const fs::path& base_dir,
                                     const std::string& name) {
  PipelineConfig cfg;
  cfg.stages = {Stage::clean,     Stage::expand, Stage::normalize,
                Stage::dedup,     Stage::split,  Stage::bpe};
  const auto resolve = [&base_dir](const std::string& p) -> fs::path {
    const fs::path path(p);
    return path.is_absolute() || p.empty() ? path : base_dir / path;
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::string section = "pipeline";
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::string where = name + ":" + std::to_string(line_no);
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw UsageError(where + ": malformed section header");
      section = stripped.substr(1, stripped.size() - 2);
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw UsageError(where + ": expected key = value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (qual == "pipeline.manifest") {
      cfg.manifest = resolve(value);
    } else if (qual == "pipeline.output_dir") {
      cfg.output_dir = resolve(value);
    } else if (qual == "pipeline.stages") {
      cfg.stages.clear();
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ',')) {
        item = trim(item);
        if (!item.empty()) cfg.stages.push_back(stage_from_string(item));
      }
    } else if (qual == "pipeline.normalization") {
      cfg.normalization = normalization_from_string(value);
    } else if (qual == "pipeline.dedup_before_normalize") {
      cfg.dedup_before_normalize = parse_bool(value, where);
    } else if (qual == "pipeline.dedup_mode") {
      if (value == "digest")
        cfg.dedup_mode = corpus::DedupMode::digest;
      else if (value == "exact")
        cfg.dedup_mode = corpus::DedupMode::exact;
      else
        throw UsageError(where + ": dedup_mode is digest or exact");
    } else if (qual == "pipeline.write_intermediate") {
      cfg.write_intermediate = parse_bool(value, where);
    } else if (qual == "pipeline.strict_counts") {
      cfg.strict_counts = parse_bool(value, where);
    } else if (qual == "pipeline.quiet") {
      cfg.quiet = parse_bool(value, where);
    } else if (qual == "clean.strip_urls") {
      cfg.clean.strip_urls = parse_bool(value, where);
    } else if (qual == "clean.strip_emoji") {
      cfg.clean.strip_emoji = parse_bool(value, where);
    } else if (qual == "clean.lowercase_latin") {
      cfg.clean.lowercase_latin = parse_bool(value, where);
    } else if (qual == "clean.collapse_whitespace") {
      cfg.clean.collapse_whitespace = parse_bool(value, where);
    } else if (qual == "clean.min_chars") {
      cfg.filter.min_chars = std::stoull(value);
    } else if (qual == "clean.max_chars") {
      cfg.filter.max_chars = std::stoull(value);
    } else if (qual == "clean.max_length_ratio") {
      cfg.filter.max_length_ratio = std::stod(value);
    } else if (qual == "clean.min_source_script_fraction") {
      cfg.filter.min_source_script_fraction = std::stod(value);
    } else if (qual == "expand.am_lexicon") {
      cfg.am_lexicon = resolve(value);
    } else if (qual == "expand.en_lexicon") {
      cfg.en_lexicon = resolve(value);
    } else if (qual == "normalize.table") {
      cfg.table_path = resolve(value);
    } else if (qual == "split.train") {
      cfg.split.train = corpus::Fraction::parse(value);
    } else if (qual == "split.valid") {
      cfg.split.valid = corpus::Fraction::parse(value);
    } else if (qual == "split.test") {
      cfg.split.test = corpus::Fraction::parse(value);
    } else if (qual == "split.seed") {
      cfg.split.seed = std::stoull(value);
    } else if (qual == "bpe.merges") {
      cfg.bpe.merges = std::stoull(value);
    } else if (qual == "bpe.joint") {
      cfg.bpe.joint = parse_bool(value, where);
    } else if (qual == "bpe.eow") {
      cfg.bpe.eow = value;
    } else {
      throw UsageError(where + ": unknown key '" + qual + "'");
    }
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.parent_path(), path.string());
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  out << "[pipeline]\n";
  out << "manifest = " << manifest.string() << '\n';
  out << "output_dir = " << output_dir.string() << '\n';
  out << "stages = ";
  for (std::size_t i = 0; i < stages.size(); ++i)
    out << (i ? "," : "") << to_string(stages[i]);
  out << '\n';
  out << "normalization = " << to_string(normalization) << '\n';
  out << "dedup_before_normalize = "
      << (dedup_before_normalize ? "true" : "false") << '\n';
  out << "dedup_mode = "
      << (dedup_mode == corpus::DedupMode::digest ? "digest" : "exact")
      << '\n';
  out << "write_intermediate = " << (write_intermediate ? "true" : "false")
      << '\n';
  out << "strict_counts = " << (strict_counts ? "true" : "false") << '\n';
  out << "[clean]\n";
  out << "strip_urls = " << (clean.strip_urls ? "true" : "false") << '\n';
  out << "strip_emoji = " << (clean.strip_emoji ? "true" : "false") << '\n';
  out << "lowercase_latin = " << (clean.lowercase_latin ? "true" : "false")
      << '\n';
  out << "collapse_whitespace = "
      << (clean.collapse_whitespace ? "true" : "false") << '\n';
  out << "min_chars = " << filter.min_chars << '\n';
  out << "max_chars = " << filter.max_chars << '\n';
  out << "max_length_ratio = " << filter.max_length_ratio << '\n';
  out << "min_source_script_fraction = " << filter.min_source_script_fraction
      << '\n';
  out << "[expand]\n";
  out << "am_lexicon = " << am_lexicon.string() << '\n';
  out << "en_lexicon = " << en_lexicon.string() << '\n';
  out << "[normalize]\n";
  out << "table = " << table_path.string() << '\n';
  out << "[split]\n";
  out << "train = " << split.train.num << '/' << split.train.den << '\n';
  out << "valid = " << split.valid.num << '/' << split.valid.den << '\n';
  out << "test = " << split.test.num << '/' << split.test.den << '\n';
  out << "seed = " << split.seed << '\n';
  out << "[bpe]\n";
  out << "merges = " << bpe.merges << '\n';
  out << "joint = " << (bpe.joint ? "true" : "false") << '\n';
  out << "eow = " << bpe.eow << '\n';
  return out.str();
}

std::string RunRecord::to_text() const {
  std::ostringstream out;
  out << "[run]\n";
  out << "version = " << version << '\n';
  out << "seed = " << seed << '\n';
  out << "started_at = " << started_at << '\n';
  out << "finished_at = " << finished_at << '\n';
  if (!failed_stage.empty()) out << "failed_stage = " << failed_stage << '\n';
  out << "[inputs]\n";
  for (const auto& [path, digest] : input_digests)
    out << path << " = " << digest << '\n';
  out << "[stages]\n";
  for (const auto& s : stages) {
    out << s.stage << " = in:" << s.in << " out:" << s.out
        << " dropped:" << s.dropped << '\n';
  }
  if (!warnings.empty()) {
    out << "[warnings]\n";
    for (const auto& w : warnings) out << w << '\n';
  }
  out << "[config]\n";
  out << config_text;
  return out.str();
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file for digest: " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h = (h ^ static_cast<unsigned char>(buf[i])) * 0x100000001B3ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return hex;
}

namespace {

void write_corpus(const std::vector<corpus::SentencePair>& pairs,
                  const fs::path& dir, const std::string& stem) {
  corpus::write_aligned(pairs, dir / (stem + ".am"), dir / (stem + ".en"));
}

void log_line(std::ostream* log, bool quiet, const std::string& message) {
  if (log != nullptr && !quiet) *log << message << '\n';
}

}  // namespace

RunRecord run(const PipelineConfig& config, std::ostream* log) {
  config.validate();
  RunRecord record;
  record.version = std::string(kVersion);
  record.config_text = config.to_text();
  record.seed = config.split.seed;
  record.started_at = now_utc();

  fs::create_directories(config.output_dir);
  const auto has_stage = [&config](Stage s) {
    return std::find(config.stages.begin(), config.stages.end(), s) !=
           config.stages.end();
  };
  const auto finish = [&record, &config](const std::string& failed) {
    record.failed_stage = failed;
    record.finished_at = now_utc();
    std::ofstream out(config.output_dir / "run_record.txt", std::ios::binary);
    if (out) out << record.to_text();
  };

  std::string current_stage = "ingest";
  try {
    const auto manifest = corpus::CorpusManifest::load(config.manifest);
    record.input_digests[config.manifest.string()] =
        file_digest(config.manifest);
    for (const auto& entry : manifest.entries) {
      record.input_digests[entry.source_path.string()] =
          file_digest(entry.source_path);
      if (entry.format == corpus::SourceFormat::two_file_aligned)
        record.input_digests[entry.target_path.string()] =
            file_digest(entry.target_path);
    }
    for (const fs::path& p : {config.am_lexicon, config.en_lexicon,
                              config.table_path}) {
      if (!p.empty()) record.input_digests[p.string()] = file_digest(p);
    }

    auto pairs = corpus::ingest_all(manifest, {config.strict_counts},
                                    &record.warnings);
    for (const auto& w : record.warnings) log_line(log, false, "warning: " + w);
    record.stages.push_back({"ingest", static_cast<std::uint64_t>(pairs.size()),
                             static_cast<std::uint64_t>(pairs.size()), 0});
    log_line(log, config.quiet,
             "ingest: " + std::to_string(pairs.size()) + " pairs");

    // clean + expand run as one pass so abbreviation expansion sees the text
    // before lowercasing.
    const bool do_clean = has_stage(Stage::clean);
    const bool do_expand = has_stage(Stage::expand);
    if (do_clean || do_expand) {
      current_stage = do_clean ? "clean" : "expand";
      textclean::AbbreviationLexicon am_lex, en_lex;
      if (do_expand && !config.am_lexicon.empty())
        am_lex = textclean::AbbreviationLexicon::load(config.am_lexicon);
      if (do_expand && !config.en_lexicon.empty())
        en_lex = textclean::AbbreviationLexicon::load(config.en_lexicon);

      const std::uint64_t in_count = pairs.size();
      std::vector<corpus::SentencePair> kept;
      kept.reserve(pairs.size());
      std::ostringstream drops;
      for (auto& pair : pairs) {
        if (do_clean) {
          pair.source = textclean::strip_noise(pair.source, config.clean);
          pair.target = textclean::strip_noise(pair.target, config.clean);
        }
        if (do_expand) {
          pair.source = am_lex.expand(pair.source);
          pair.target = en_lex.expand(pair.target);
        }
        if (do_clean) {
          pair.source = textclean::finish_clean(pair.source, config.clean);
          pair.target = textclean::finish_clean(pair.target, config.clean);
          const auto reason =
              textclean::filter_pair(pair.source, pair.target, config.filter);
          if (reason != textclean::DropReason::none) {
            drops << pair.origin << '\t' << pair.line_no << '\t'
                  << textclean::to_string(reason) << '\n';
            continue;
          }
        }
        kept.push_back(std::move(pair));
      }
      pairs = std::move(kept);
      if (do_clean) {
        record.stages.push_back(
            {"clean", in_count, static_cast<std::uint64_t>(pairs.size()),
             in_count - pairs.size()});
        std::ofstream drop_file(config.output_dir / "drops.tsv",
                                std::ios::binary);
        drop_file << drops.str();
        log_line(log, config.quiet,
                 "clean: kept " + std::to_string(pairs.size()) + " of " +
                     std::to_string(in_count));
        if (config.write_intermediate)
          write_corpus(pairs, config.output_dir, "clean");
      }
      if (do_expand) {
        record.stages.push_back({"expand",
                                 static_cast<std::uint64_t>(pairs.size()),
                                 static_cast<std::uint64_t>(pairs.size()), 0});
        if (config.write_intermediate && !do_clean)
          write_corpus(pairs, config.output_dir, "expand");
      }
    }

    const auto run_normalize = [&]() {
      if (!has_stage(Stage::normalize)) return;
      current_stage = "normalize";
      const std::uint64_t in_count = pairs.size();
      if (config.normalization != NormalizationMode::off) {
        ethiopic::NormalizationTable table;
        if (config.normalization == NormalizationMode::fixed) {
          table = config.table_path.empty()
                      ? ethiopic::default_table()
                      : ethiopic::load_table(config.table_path);
        } else {
          // Learned mode: frequency pass over the current source side.
          std::map<char32_t, std::uint64_t> counts;
          for (const auto& pair : pairs) {
            for (char32_t cp : utf8::decode(pair.source)) {
              if (ethiopic::is_ethiopic(cp)) ++counts[cp];
            }
          }
          auto learned = ethiopic::learn_table(counts);
          table = std::move(learned.table);
          ethiopic::save_table(table, config.output_dir / "learned_table.tsv");
          std::ofstream report(config.output_dir / "cell_report.tsv",
                               std::ios::binary);
          report << learned.report.to_tsv();
        }
        for (auto& pair : pairs)
          pair.source = ethiopic::normalize_text(pair.source, table);
      }
      record.stages.push_back({"normalize", in_count, in_count, 0});
      log_line(log, config.quiet,
               "normalize: mode " +
                   std::string(to_string(config.normalization)));
      if (config.write_intermediate)
        write_corpus(pairs, config.output_dir, "normalize");
    };

    const auto run_dedup = [&]() {
      if (!has_stage(Stage::dedup)) return;
      current_stage = "dedup";
      const std::uint64_t in_count = pairs.size();
      auto result = corpus::dedup(std::move(pairs), config.dedup_mode);
      pairs = std::move(result.pairs);
      record.stages.push_back({"dedup", in_count,
                               static_cast<std::uint64_t>(pairs.size()),
                               result.dropped});
      log_line(log, config.quiet,
               "dedup: dropped " + std::to_string(result.dropped));
      if (config.write_intermediate)
        write_corpus(pairs, config.output_dir, "dedup");
    };

    if (config.dedup_before_normalize) {
      run_dedup();
      run_normalize();
    } else {
      run_normalize();
      run_dedup();
    }

    write_corpus(pairs, config.output_dir, "corpus");

    std::vector<std::pair<std::string, const std::vector<corpus::SentencePair>*>>
        bpe_inputs;
    corpus::SplitResult split_result;
    if (has_stage(Stage::split)) {
      current_stage = "split";
      const std::uint64_t in_count = pairs.size();
      split_result = corpus::split(pairs, config.split);
      write_corpus(split_result.train, config.output_dir, "train");
      write_corpus(split_result.valid, config.output_dir, "valid");
      write_corpus(split_result.test, config.output_dir, "test");
      record.stages.push_back({"split", in_count, in_count, 0});
      log_line(log, config.quiet,
               "split: " + std::to_string(split_result.train.size()) + "/" +
                   std::to_string(split_result.valid.size()) + "/" +
                   std::to_string(split_result.test.size()));
      bpe_inputs = {{"train", &split_result.train},
                    {"valid", &split_result.valid},
                    {"test", &split_result.test}};
    } else {
      bpe_inputs = {{"corpus", &pairs}};
    }

    if (has_stage(Stage::bpe)) {
      current_stage = "bpe";
      const std::uint64_t in_count = pairs.size();
      // Models are learned on the training portion only.
      const auto& learn_on = *bpe_inputs.front().second;
      std::vector<std::string> src_lines, tgt_lines;
      src_lines.reserve(learn_on.size());
      tgt_lines.reserve(learn_on.size());
      for (const auto& pair : learn_on) {
        src_lines.push_back(pair.source);
        tgt_lines.push_back(pair.target);
      }
      bpe::BpeModel src_model, tgt_model;
      if (config.bpe.joint) {
        std::vector<std::string> all = src_lines;
        all.insert(all.end(), tgt_lines.begin(), tgt_lines.end());
        src_model = bpe::learn(bpe::count_words(all), config.bpe.merges,
                               config.bpe.eow);
        src_model.save(config.output_dir / "bpe.joint.model");
        tgt_model = src_model;
      } else {
        src_model = bpe::learn(bpe::count_words(src_lines), config.bpe.merges,
                               config.bpe.eow);
        tgt_model = bpe::learn(bpe::count_words(tgt_lines), config.bpe.merges,
                               config.bpe.eow);
        src_model.save(config.output_dir / "bpe.am.model");
        tgt_model.save(config.output_dir / "bpe.en.model");
      }
      bpe::Applier src_applier(src_model), tgt_applier(tgt_model);
      for (const auto& [stem, subset] : bpe_inputs) {
        std::vector<std::string> src_tok, tgt_tok;
        src_tok.reserve(subset->size());
        tgt_tok.reserve(subset->size());
        for (const auto& pair : *subset) {
          const auto join = [](const std::vector<std::string>& tokens) {
            std::string line;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
              if (i) line.push_back(' ');
              line += tokens[i];
            }
            return line;
          };
          src_tok.push_back(join(src_applier.apply_line(pair.source)));
          tgt_tok.push_back(join(tgt_applier.apply_line(pair.target)));
        }
        corpus::write_lines(src_tok, config.output_dir / (stem + ".bpe.am"));
        corpus::write_lines(tgt_tok, config.output_dir / (stem + ".bpe.en"));
      }
      record.stages.push_back({"bpe", in_count, in_count, 0});
      log_line(log, config.quiet,
               "bpe: " + std::to_string(src_model.merges.size()) + "+" +
                   std::to_string(tgt_model.merges.size()) + " merges");
    }
  } catch (...) {
    finish(current_stage);
    throw;
  }

  finish("");
  return record;
}

}  // namespace ametk::pipeline
