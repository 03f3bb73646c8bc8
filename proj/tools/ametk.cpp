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

// ametk command line: composable subcommands over the corpus toolkit.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ametk/bleu.hpp"
#include "ametk/bpe.hpp"
#include "ametk/corpus.hpp"
#include "ametk/error.hpp"
#include "ametk/ethiopic.hpp"
#include "ametk/pipeline.hpp"
#include "ametk/textclean.hpp"
#include "ametk/utf8.hpp"
#include "ametk/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace ametk;

std::string default_output_dir() {
  const char* env = std::getenv("AMETK_OUTPUT_DIR");
  return env != nullptr ? env : ".";
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string line;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) line.push_back(' ');
    line += tokens[i];
  }
  return line;
}

void add_ingest(CLI::App& app) {
  auto* cmd = app.add_subcommand("ingest", "Read manifest sources into an aligned corpus");
  struct Opts {
    std::string manifest, out_src, out_tgt;
    bool strict = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--manifest", opts->manifest, "Manifest TSV")->required();
  cmd->add_option("--out-src", opts->out_src, "Output source file")->required();
  cmd->add_option("--out-tgt", opts->out_tgt, "Output target file")->required();
  cmd->add_flag("--strict-counts", opts->strict,
                "Treat declared-count mismatches as errors");
  cmd->callback([opts] {
    const auto manifest = corpus::CorpusManifest::load(opts->manifest);
    std::vector<std::string> warnings;
    const auto pairs =
        corpus::ingest_all(manifest, {opts->strict}, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    corpus::write_aligned(pairs, opts->out_src, opts->out_tgt);
    std::cout << pairs.size() << " pairs\n";
  });
}

void add_clean(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "clean", "Clean a pair corpus (URLs, emoji, abbreviations, casing, noise)");
  struct Opts {
    std::string in_src, in_tgt, out_src, out_tgt, am_lex, en_lex, drops;
    textclean::CleanOptions clean;
    textclean::FilterRules filter;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in-src", opts->in_src)->required();
  cmd->add_option("--in-tgt", opts->in_tgt)->required();
  cmd->add_option("--out-src", opts->out_src)->required();
  cmd->add_option("--out-tgt", opts->out_tgt)->required();
  cmd->add_option("--am-lexicon", opts->am_lex, "Amharic abbreviation lexicon");
  cmd->add_option("--en-lexicon", opts->en_lex, "English abbreviation lexicon");
  cmd->add_option("--drops", opts->drops, "Write drop log TSV here");
  cmd->add_flag("!--no-urls", opts->clean.strip_urls, "Keep URL tokens");
  cmd->add_flag("!--no-emoji", opts->clean.strip_emoji, "Keep emoji");
  cmd->add_flag("!--no-lowercase", opts->clean.lowercase_latin,
                "Keep Latin casing");
  cmd->add_flag("!--no-collapse", opts->clean.collapse_whitespace,
                "Keep whitespace runs");
  cmd->add_option("--min-chars", opts->filter.min_chars);
  cmd->add_option("--max-chars", opts->filter.max_chars);
  cmd->add_option("--max-ratio", opts->filter.max_length_ratio);
  cmd->add_option("--min-script-fraction",
                  opts->filter.min_source_script_fraction);
  cmd->callback([opts] {
    opts->filter.validate();
    textclean::AbbreviationLexicon am_lex, en_lex;
    if (!opts->am_lex.empty())
      am_lex = textclean::AbbreviationLexicon::load(opts->am_lex);
    if (!opts->en_lex.empty())
      en_lex = textclean::AbbreviationLexicon::load(opts->en_lex);
    auto pairs = corpus::read_aligned(opts->in_src, opts->in_tgt);
    std::vector<corpus::SentencePair> kept;
    std::ostringstream drops;
    for (auto& pair : pairs) {
      pair.source = textclean::strip_noise(pair.source, opts->clean);
      pair.target = textclean::strip_noise(pair.target, opts->clean);
      pair.source = am_lex.expand(pair.source);
      pair.target = en_lex.expand(pair.target);
      pair.source = textclean::finish_clean(pair.source, opts->clean);
      pair.target = textclean::finish_clean(pair.target, opts->clean);
      const auto reason =
          textclean::filter_pair(pair.source, pair.target, opts->filter);
      if (reason != textclean::DropReason::none) {
        drops << pair.origin << '\t' << pair.line_no << '\t'
              << textclean::to_string(reason) << '\n';
        continue;
      }
      kept.push_back(std::move(pair));
    }
    corpus::write_aligned(kept, opts->out_src, opts->out_tgt);
    if (!opts->drops.empty()) write_text(opts->drops, drops.str());
    std::cout << kept.size() << " kept, " << (pairs.size() - kept.size())
              << " dropped\n";
  });
}

void add_normalize(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "normalize", "Normalize Amharic homophone characters in a text file");
  struct Opts {
    std::string in, out, table = "default", save_table, report;
    bool learn = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in", opts->in)->required();
  cmd->add_option("--out", opts->out)->required();
  cmd->add_option("--table", opts->table,
                  "Mapping table file, or 'default' for the built-in");
  cmd->add_flag("--learn", opts->learn,
                "Learn a frequency table from the input first");
  cmd->add_option("--save-table", opts->save_table,
                  "Write the applied table here");
  cmd->add_option("--report", opts->report,
                  "Write the cell frequency report here (with --learn)");
  cmd->callback([opts] {
    const auto lines = corpus::read_lines(opts->in);
    ethiopic::NormalizationTable table;
    if (opts->learn) {
      auto learned = ethiopic::learn_table(lines);
      table = std::move(learned.table);
      if (!opts->report.empty())
        write_text(opts->report, learned.report.to_tsv());
    } else if (opts->table == "default") {
      table = ethiopic::default_table();
    } else {
      table = ethiopic::load_table(opts->table);
    }
    if (!opts->save_table.empty()) ethiopic::save_table(table, opts->save_table);
    std::vector<std::string> out_lines;
    out_lines.reserve(lines.size());
    for (const auto& line : lines)
      out_lines.push_back(ethiopic::normalize_text(line, table));
    corpus::write_lines(out_lines, opts->out);
  });
}

void add_dedup(CLI::App& app) {
  auto* cmd =
      app.add_subcommand("dedup", "Drop exact duplicate pairs, first wins");
  struct Opts {
    std::string in_src, in_tgt, out_src, out_tgt;
    bool exact = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in-src", opts->in_src)->required();
  cmd->add_option("--in-tgt", opts->in_tgt)->required();
  cmd->add_option("--out-src", opts->out_src)->required();
  cmd->add_option("--out-tgt", opts->out_tgt)->required();
  cmd->add_flag("--exact", opts->exact,
                "Keep full keys instead of 128-bit digests");
  cmd->callback([opts] {
    auto pairs = corpus::read_aligned(opts->in_src, opts->in_tgt);
    auto result = corpus::dedup(
        std::move(pairs),
        opts->exact ? corpus::DedupMode::exact : corpus::DedupMode::digest);
    corpus::write_aligned(result.pairs, opts->out_src, opts->out_tgt);
    std::cout << result.pairs.size() << " kept, " << result.dropped
              << " duplicates dropped\n";
  });
}

void add_split(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "split", "Deterministic seeded train/valid/test split");
  struct Opts {
    std::string in_src, in_tgt, out_dir = default_output_dir();
    std::string train = "0.8", valid = "0.1", test = "0.1";
    std::uint64_t seed = 1;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in-src", opts->in_src)->required();
  cmd->add_option("--in-tgt", opts->in_tgt)->required();
  cmd->add_option("--out-dir", opts->out_dir,
                  "Output directory (default $AMETK_OUTPUT_DIR or .)");
  cmd->add_option("--train", opts->train, "Train fraction");
  cmd->add_option("--valid", opts->valid, "Validation fraction");
  cmd->add_option("--test", opts->test, "Test fraction");
  cmd->add_option("--seed", opts->seed, "Shuffle seed");
  cmd->callback([opts] {
    corpus::SplitSpec spec;
    spec.train = corpus::Fraction::parse(opts->train);
    spec.valid = corpus::Fraction::parse(opts->valid);
    spec.test = corpus::Fraction::parse(opts->test);
    spec.seed = opts->seed;
    const auto pairs = corpus::read_aligned(opts->in_src, opts->in_tgt);
    const auto result = corpus::split(pairs, spec);
    const fs::path dir(opts->out_dir);
    fs::create_directories(dir);
    corpus::write_aligned(result.train, dir / "train.am", dir / "train.en");
    corpus::write_aligned(result.valid, dir / "valid.am", dir / "valid.en");
    corpus::write_aligned(result.test, dir / "test.am", dir / "test.en");
    std::cout << result.train.size() << "/" << result.valid.size() << "/"
              << result.test.size() << '\n';
  });
}

void add_bpe_learn(CLI::App& app) {
  auto* cmd = app.add_subcommand("bpe-learn", "Learn a BPE merge list");
  struct Opts {
    std::vector<std::string> inputs;
    std::string out, eow{bpe::kDefaultEow};
    std::size_t merges = 32000;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--in", opts->inputs, "Training text file(s)")->required();
  cmd->add_option("--out", opts->out, "Model file")->required();
  cmd->add_option("--merges", opts->merges, "Number of merges");
  cmd->add_option("--eow", opts->eow, "End-of-word marker");
  cmd->callback([opts] {
    std::vector<std::string> lines;
    for (const auto& path : opts->inputs) {
      auto file_lines = corpus::read_lines(path);
      lines.insert(lines.end(), std::make_move_iterator(file_lines.begin()),
                   std::make_move_iterator(file_lines.end()));
    }
    const auto model =
        bpe::learn(bpe::count_words(lines), opts->merges, opts->eow);
    model.save(opts->out);
    std::cout << model.merges.size() << " merges\n";
  });
}

void add_bpe_apply(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "bpe-apply", "Tokenize text with a BPE model (or --decode tokens back)");
  struct Opts {
    std::string model, in, out;
    bool decode = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--model", opts->model)->required();
  cmd->add_option("--in", opts->in)->required();
  cmd->add_option("--out", opts->out)->required();
  cmd->add_flag("--decode", opts->decode, "Invert tokenization");
  cmd->callback([opts] {
    const auto model = bpe::BpeModel::load(opts->model);
    const auto lines = corpus::read_lines(opts->in);
    std::vector<std::string> out_lines;
    out_lines.reserve(lines.size());
    if (opts->decode) {
      for (const auto& line : lines) {
        out_lines.push_back(
            bpe::decode(utf8::split_words(line), model.eow));
      }
    } else {
      bpe::Applier applier(model);
      for (const auto& line : lines)
        out_lines.push_back(join_tokens(applier.apply_line(line)));
    }
    corpus::write_lines(out_lines, opts->out);
  });
}

void add_bleu(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "bleu", "Corpus BLEU; two --hyp files produce a comparison report");
  struct Opts {
    std::vector<std::string> hyps;
    std::vector<std::string> refs;
    std::string labels = "regular,normalized";
    std::size_t max_n = 4;
    std::string smoothing = "none";
    bool tsv = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--hyp", opts->hyps, "Hypothesis file (repeat for comparison)")
      ->required()
      ->expected(1, 2);
  cmd->add_option("--ref", opts->refs, "Reference file(s)")->required();
  cmd->add_option("--labels", opts->labels, "Comparison labels, comma separated");
  cmd->add_option("--max-n", opts->max_n, "Maximum n-gram order");
  cmd->add_option("--smoothing", opts->smoothing, "none or add-one");
  cmd->add_flag("--tsv", opts->tsv, "Emit TSV instead of the human block");
  cmd->callback([opts] {
    bleu::Smoothing smoothing;
    if (opts->smoothing == "none")
      smoothing = bleu::Smoothing::none;
    else if (opts->smoothing == "add-one")
      smoothing = bleu::Smoothing::add_one;
    else
      throw UsageError("smoothing must be none or add-one");
    std::vector<fs::path> refs(opts->refs.begin(), opts->refs.end());
    const auto score = [&](const std::string& hyp) {
      return bleu::corpus_bleu(bleu::load_pairs(hyp, refs), opts->max_n, {},
                               smoothing);
    };
    if (opts->hyps.size() == 1) {
      const auto report = score(opts->hyps[0]);
      std::cout << (opts->tsv ? report.to_tsv() : report.human() + "\n");
      return;
    }
    const auto comma = opts->labels.find(',');
    if (comma == std::string::npos)
      throw UsageError("--labels needs two comma-separated names");
    const auto record = bleu::compare_runs(
        score(opts->hyps[0]), score(opts->hyps[1]),
        opts->labels.substr(0, comma), opts->labels.substr(comma + 1));
    std::cout << (opts->tsv ? record.to_tsv() : record.human());
  });
}

void add_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "stats", "Corpus statistics, or declared manifest totals with --declared");
  struct Opts {
    std::string manifest, src, tgt;
    bool declared = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--manifest", opts->manifest, "Manifest TSV");
  cmd->add_option("--src", opts->src, "Source-side corpus file");
  cmd->add_option("--tgt", opts->tgt, "Target-side corpus file");
  cmd->add_flag("--declared", opts->declared,
                "Report declared counts without reading source files");
  cmd->callback([opts] {
    if (opts->declared) {
      if (opts->manifest.empty())
        throw UsageError("--declared needs --manifest");
      const auto manifest = corpus::CorpusManifest::load(opts->manifest);
      std::cout << "[declared]\n";
      for (const auto& entry : manifest.entries) {
        std::cout << entry.origin << '\t';
        if (entry.declared_count)
          std::cout << *entry.declared_count;
        else
          std::cout << '-';
        std::cout << '\n';
      }
      const auto total = manifest.declared_total();
      std::cout << "total\t" << (total ? std::to_string(*total) : "-") << '\n';
      return;
    }
    std::vector<corpus::SentencePair> pairs;
    if (!opts->manifest.empty()) {
      pairs = corpus::ingest_all(corpus::CorpusManifest::load(opts->manifest));
    } else if (!opts->src.empty() && !opts->tgt.empty()) {
      pairs = corpus::read_aligned(opts->src, opts->tgt);
    } else {
      throw UsageError("stats needs --manifest or --src/--tgt");
    }
    std::cout << corpus::stats(pairs).to_tsv();
  });
}

void add_run(CLI::App& app) {
  auto* cmd = app.add_subcommand("run", "Execute a configured pipeline");
  struct Opts {
    std::string config, out;
    bool quiet = false;
  };
  auto opts = std::make_shared<Opts>();
  cmd->add_option("--config", opts->config, "Pipeline config file")->required();
  cmd->add_option("--out", opts->out, "Override the output directory");
  cmd->add_flag("--quiet", opts->quiet, "Suppress progress logging");
  cmd->callback([opts] {
    auto config = pipeline::PipelineConfig::load(opts->config);
    if (!opts->out.empty()) config.output_dir = opts->out;
    if (config.output_dir.empty()) config.output_dir = default_output_dir();
    if (opts->quiet) config.quiet = true;
    pipeline::run(config, &std::cerr);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Amharic-English parallel corpus toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  add_ingest(app);
  add_clean(app);
  add_normalize(app);
  add_dedup(app);
  add_split(app);
  add_bpe_learn(app);
  add_bpe_apply(app);
  add_bleu(app);
  add_stats(app);
  add_run(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // help / version
    std::cerr << "ametk: usage: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "ametk: usage: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    std::cerr << "ametk: data: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ametk: internal: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
