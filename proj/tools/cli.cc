/* Copyright 2026 The VISOR Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "cli.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <unordered_map>

#include "CLI11.hpp"
#include "visor/corpus.h"
#include "visor/detection.h"
#include "visor/error.h"
#include "visor/evaluation.h"
#include "visor/metrics.h"
#include "visor/report.h"
#include "visor/sr2d.h"

namespace visor::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string categories = "coco80";
  std::string corpus;
  std::string detections;
  std::string evaluations;
  std::string scores;
  std::string annotations;
  std::string out;
  std::string format = "csv";
  double threshold = kDefaultThreshold;
  int images_per_prompt = kDefaultImagesPerPrompt;
  std::vector<std::string> variants = {"phrase"};
  std::size_t count = 1000;
  std::uint64_t seed = 0;
  std::vector<std::string> sizes;
  std::vector<std::string> colors;
  std::vector<double> thresholds = {0.1, 0.2, 0.3, 0.4};
  std::string corpus_id;
  std::string detector_id;
  std::string config;
};

std::ifstream OpenInput(const std::string& path, const char* flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(std::string(flag) + ": cannot open '" + path + "'");
  return in;
}

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Writes to `path`, or to `out` when no path was given.
void Emit(const std::string& path, const std::string& content,
          std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    WriteFile(path, content);
  }
}

void EnsureDirectory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("--out: cannot create directory '" + dir + "'");
  }
}

Vocabulary LoadVocabulary(const std::string& source) {
  if (source == "coco80") return Vocabulary::Coco();
  if (source == "representative") return RepresentativeVocabulary();
  std::ifstream in = OpenInput(source, "--categories");
  return Vocabulary::Load(in);
}

TableFormat Format(const Options& o) { return *ParseTableFormat(o.format); }

std::string Stem(const std::string& path) {
  return fs::path(path).stem().string();
}

// Prefixes parse errors with the file they came from.
template <typename F>
auto WithFile(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.field(),
                     "in '" + path + "': " + std::string(e.what()));
  }
}

std::vector<Prompt> ReadCorpusFile(const std::string& path,
                                   const Vocabulary& vocabulary) {
  std::ifstream in = OpenInput(path, "--corpus");
  return WithFile(path, [&] { return ReadCorpus(in, vocabulary); });
}

std::vector<ImageDetections> ReadDetectionsFile(const std::string& path,
                                                int images_per_prompt) {
  std::ifstream in = OpenInput(path, "--detections");
  return WithFile(path,
                  [&] { return ParseDetections(in, images_per_prompt); });
}

std::vector<PromptGroup> ReadEvaluationsFile(const std::string& path,
                                             const Vocabulary& vocabulary) {
  std::ifstream in = OpenInput(path, "--evaluations");
  return WithFile(path, [&] { return ReadEvaluations(in, vocabulary); });
}

std::vector<ScoreRecord> ReadScoresFile(const std::string& path) {
  std::ifstream in = OpenInput(path, "--scores");
  return WithFile(path, [&] { return ParseScores(in); });
}

CooccurrenceTable ReadAnnotationsFile(const std::string& path) {
  std::ifstream in = OpenInput(path, "--annotations");
  return WithFile(path, [&] { return LoadCooccurrence(in); });
}

std::vector<DeltaSRow> DeltaSRows(const std::vector<ScoreRecord>& scores,
                                  const std::vector<Prompt>* corpus,
                                  std::ostream& err) {
  std::vector<DeltaSRow> rows = {{"all", scores.size(), DeltaS(scores)}};
  if (corpus == nullptr) return rows;
  std::unordered_map<std::string, const Prompt*> by_id;
  for (const Prompt& p : *corpus) by_id.emplace(p.id, &p);
  std::map<Relation, std::vector<ScoreRecord>> split;
  std::size_t unknown = 0;
  for (const ScoreRecord& s : scores) {
    auto it = by_id.find(s.prompt_id);
    if (it == by_id.end() || !it->second->relation) {
      ++unknown;
      continue;
    }
    split[*it->second->relation].push_back(s);
  }
  if (unknown > 0) {
    err << "warning: " << unknown
        << " score records have no relation prompt in the corpus\n";
  }
  for (const auto& [r, records] : split) {
    rows.push_back({std::string(RelationName(r)), records.size(),
                    DeltaS(records)});
  }
  return rows;
}

void WriteReportFiles(const RunReport& report, const Options& o,
                      std::ostream& out) {
  const fs::path dir(o.out);
  const TableFormat format = Format(o);
  const std::string ext(TableFormatExtension(format));
  WriteFile(dir / "report.json", EmitReportJson(report));
  WriteFile(dir / ("benchmark." + ext), EmitBenchmarkTable(report, format));
  WriteFile(dir / "supercategory.csv", EmitSupercategoryMatrix(report));
  WriteFile(dir / ("object_bias." + ext), EmitObjectBiasTable(report, format));
  if (report.consistency) {
    WriteFile(dir / ("consistency." + ext),
              EmitConsistencyTable(*report.consistency, format));
  }
  out << "prompts " << report.overall.prompts << ", images "
      << report.overall.images << ", OA "
      << FormatPercent(report.overall.oa_pct) << ", VISOR "
      << FormatPercent(report.overall.visor_uncond_pct) << "\n";
}

int CmdGen(const Options& o, std::ostream& out) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  CorpusConfig config;
  config.variants.clear();
  for (const std::string& v : o.variants) {
    config.variants.push_back(*ParseVariantKind(v));
  }
  config.attributed_count = o.count;
  config.seed = o.seed;
  if (!o.sizes.empty()) config.attributes.sizes = o.sizes;
  if (!o.colors.empty()) config.attributes.colors = o.colors;
  const std::vector<Prompt> corpus = GenerateCorpus(vocabulary, config);
  std::ostringstream buffer;
  WriteCorpus(buffer, corpus);
  WriteFile(o.out, buffer.str());
  out << corpus.size() << " prompts written to " << o.out << "\n";
  return 0;
}

int CmdEvaluate(const Options& o, std::ostream& out, std::ostream& err) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  const auto corpus = ReadCorpusFile(o.corpus, vocabulary);
  const auto detections = ReadDetectionsFile(o.detections, o.images_per_prompt);
  EnsureDirectory(o.out);

  RunEvaluation run =
      EvaluateRun(corpus, detections, {o.threshold, o.images_per_prompt});
  for (const std::string& w : run.coverage.warnings) {
    err << "warning: " << w << "\n";
  }
  RunMetadata metadata{o.corpus_id.empty() ? Stem(o.corpus) : o.corpus_id,
                       o.detector_id.empty() ? Stem(o.detections) : o.detector_id,
                       o.threshold, o.images_per_prompt};
  const RunReport report =
      BuildReport(run.groups, vocabulary, metadata, run.coverage);

  std::ostringstream evaluations;
  WriteEvaluations(evaluations, run.groups);
  WriteFile(fs::path(o.out) / "evaluations.jsonl", evaluations.str());
  WriteReportFiles(report, o, out);
  return 0;
}

int CmdReport(const Options& o, std::ostream& out, std::ostream& err) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  const auto groups = ReadEvaluationsFile(o.evaluations, vocabulary);
  std::optional<std::vector<ScoreRecord>> scores;
  if (!o.scores.empty()) scores = ReadScoresFile(o.scores);
  std::optional<CooccurrenceTable> cooccurrence;
  if (!o.annotations.empty()) cooccurrence = ReadAnnotationsFile(o.annotations);
  EnsureDirectory(o.out);

  Coverage coverage;
  for (const PromptGroup& g : groups) {
    coverage.expected_images += g.evaluations.size();
    for (const ImageEvaluation& e : g.evaluations) {
      coverage.missing_images += e.missing ? 1 : 0;
    }
  }
  if (coverage.missing_images > 0) {
    coverage.warnings.push_back(std::to_string(coverage.missing_images) +
                                " image slots were scored as missing");
    err << "warning: " << coverage.warnings.back() << "\n";
  }
  RunMetadata metadata{o.corpus_id.empty() ? Stem(o.evaluations) : o.corpus_id,
                       o.detector_id.empty() ? "unspecified" : o.detector_id,
                       o.threshold, ImagesPerPrompt(groups)};
  RunReport report = BuildReport(groups, vocabulary, metadata, coverage);
  if (scores) report.delta_s = DeltaS(*scores);
  if (cooccurrence) {
    report.correlation = CorrelateWithCooccurrence(groups, *cooccurrence);
  }
  WriteReportFiles(report, o, out);
  return 0;
}

int CmdConsistency(const Options& o, std::ostream& out) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  const auto groups = ReadEvaluationsFile(o.evaluations, vocabulary);
  const ConsistencyResult result = Consistency(groups);
  if (result.pct.empty()) {
    throw ValidationError(
        "no equivalent prompt pair has images with both objects detected");
  }
  Emit(o.out, EmitConsistencyTable(result, Format(o)), out);
  return 0;
}

int CmdDeltaS(const Options& o, std::ostream& out, std::ostream& err) {
  const auto scores = ReadScoresFile(o.scores);
  std::optional<std::vector<Prompt>> corpus;
  if (!o.corpus.empty()) {
    corpus = ReadCorpusFile(o.corpus, LoadVocabulary(o.categories));
  }
  const auto rows = DeltaSRows(scores, corpus ? &*corpus : nullptr, err);
  Emit(o.out, EmitDeltaSTable(rows, Format(o)), out);
  return 0;
}

int CmdCorrelate(const Options& o, std::ostream& out) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  const auto groups = ReadEvaluationsFile(o.evaluations, vocabulary);
  const auto table = ReadAnnotationsFile(o.annotations);
  Emit(o.out,
       EmitCorrelationTable(CorrelateWithCooccurrence(groups, table), Format(o)),
       out);
  return 0;
}

int CmdSweep(const Options& o, std::ostream& out) {
  const Vocabulary vocabulary = LoadVocabulary(o.categories);
  const auto corpus = ReadCorpusFile(o.corpus, vocabulary);
  const auto detections = ReadDetectionsFile(o.detections, o.images_per_prompt);
  const auto sweep =
      ThresholdSweep(corpus, detections, o.thresholds, o.images_per_prompt);
  Emit(o.out, EmitSweepTable(sweep, Format(o)), out);
  return 0;
}

struct Cli {
  CLI::App app{"Spatial-relationship prompt corpus and VISOR evaluation"};
  Options o;
  CLI::App* gen = nullptr;
  CLI::App* evaluate = nullptr;
  CLI::App* report = nullptr;
  CLI::App* consistency = nullptr;
  CLI::App* delta = nullptr;
  CLI::App* correlate = nullptr;
  CLI::App* sweep = nullptr;

  Cli();
  CLI::App* Selected() const {
    auto chosen = app.get_subcommands();
    return chosen.empty() ? nullptr : chosen.front();
  }
};

Cli::Cli() {
  app.require_subcommand(1);

  const std::vector<std::string> variant_names = {
      "phrase",     "sentence",      "split-sentence",
      "attributed", "single-object", "conjunction"};
  const std::vector<std::string> format_names = {"csv", "json", "markdown",
                                                 "md"};

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config,
                    "Flat key=value file; flags take precedence")
        ->check(CLI::ExistingFile);
  };
  auto add_categories = [&](CLI::App* sub) {
    sub->add_option("--categories", o.categories,
                    "coco80, representative, or a name,supercategory file")
        ->capture_default_str();
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "csv, json or markdown")
        ->check(CLI::IsMember(format_names))
        ->capture_default_str();
  };
  auto add_threshold = [&](CLI::App* sub) {
    sub->add_option("--threshold", o.threshold, "Detection confidence threshold")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  };
  auto add_images = [&](CLI::App* sub) {
    sub->add_option("--images-per-prompt", o.images_per_prompt,
                    "Images generated per prompt (N)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_ids = [&](CLI::App* sub) {
    sub->add_option("--corpus-id", o.corpus_id, "Corpus name for the report");
    sub->add_option("--detector-id", o.detector_id,
                    "Detector name for the report");
  };

  gen = app.add_subcommand("gen", "Generate a prompt corpus");
  add_config(gen);
  add_categories(gen);
  gen->add_option("--variant", o.variants, "Prompt variants (repeatable)")
      ->delimiter(',')
      ->check(CLI::IsMember(variant_names))
      ->capture_default_str();
  gen->add_option("--count", o.count, "Sampled attributed prompts")
      ->capture_default_str();
  gen->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  gen->add_option("--sizes", o.sizes, "Size vocabulary")->delimiter(',');
  gen->add_option("--colors", o.colors, "Color vocabulary")->delimiter(',');
  gen->add_option("-o,--out", o.out, "Output prompt file")->required();

  evaluate = app.add_subcommand("evaluate", "Score detections against a corpus");
  add_config(evaluate);
  add_categories(evaluate);
  evaluate->add_option("--corpus", o.corpus, "Prompt file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--detections", o.detections, "Detection file")
      ->required()
      ->check(CLI::ExistingFile);
  add_threshold(evaluate);
  add_images(evaluate);
  add_format(evaluate);
  add_ids(evaluate);
  evaluate->add_option("--out", o.out, "Output directory")->required();

  report =
      app.add_subcommand("report", "Rebuild report tables from evaluations");
  add_config(report);
  add_categories(report);
  report->add_option("--evaluations", o.evaluations, "Evaluation file")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--scores", o.scores, "Score file for delta-s")
      ->check(CLI::ExistingFile);
  report->add_option("--annotations", o.annotations, "Co-occurrence input")
      ->check(CLI::ExistingFile);
  add_threshold(report);
  add_format(report);
  add_ids(report);
  report->add_option("--out", o.out, "Output directory")->required();

  consistency = app.add_subcommand(
      "consistency", "Agreement between equivalent phrasings");
  add_config(consistency);
  add_categories(consistency);
  consistency->add_option("--evaluations", o.evaluations, "Evaluation file")
      ->required()
      ->check(CLI::ExistingFile);
  add_format(consistency);
  consistency->add_option("--out", o.out, "Output file (default stdout)");

  delta = app.add_subcommand(
      "delta-s", "Mean score difference between true and flipped prompts");
  add_config(delta);
  add_categories(delta);
  delta->add_option("--scores", o.scores, "Score file")
      ->required()
      ->check(CLI::ExistingFile);
  delta->add_option("--corpus", o.corpus, "Prompt file for a relation split")
      ->check(CLI::ExistingFile);
  add_format(delta);
  delta->add_option("--out", o.out, "Output file (default stdout)");

  correlate = app.add_subcommand(
      "correlate", "Correlate OA and VISOR_cond with co-occurrence");
  add_config(correlate);
  add_categories(correlate);
  correlate->add_option("--evaluations", o.evaluations, "Evaluation file")
      ->required()
      ->check(CLI::ExistingFile);
  correlate->add_option("--annotations", o.annotations, "Co-occurrence input")
      ->required()
      ->check(CLI::ExistingFile);
  add_format(correlate);
  correlate->add_option("--out", o.out, "Output file (default stdout)");

  sweep = app.add_subcommand("sweep", "Re-evaluate at several thresholds");
  add_config(sweep);
  add_categories(sweep);
  sweep->add_option("--corpus", o.corpus, "Prompt file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--detections", o.detections, "Detection file")
      ->required()
      ->check(CLI::ExistingFile);
  sweep->add_option("--thresholds", o.thresholds, "Ascending thresholds")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  add_images(sweep);
  add_format(sweep);
  sweep->add_option("--out", o.out, "Output file (default stdout)");
}

// Flat "key=value" lines; '#' starts a comment.
std::vector<std::pair<std::string, std::string>> ReadConfig(
    const std::string& path) {
  std::ifstream in = OpenInput(path, "--config");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(line_no, "", "in '" + path + "': expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

int Dispatch(const Cli& cli, std::ostream& out, std::ostream& err) {
  const Options& o = cli.o;
  if (*cli.gen) return CmdGen(o, out);
  if (*cli.evaluate) return CmdEvaluate(o, out, err);
  if (*cli.report) return CmdReport(o, out, err);
  if (*cli.consistency) return CmdConsistency(o, out);
  if (*cli.delta) return CmdDeltaS(o, out, err);
  if (*cli.correlate) return CmdCorrelate(o, out);
  if (*cli.sweep) return CmdSweep(o, out);
  return 1;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  auto parse = [](Cli& cli, const std::vector<std::string>& argv) {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    cli.app.parse(reversed);
  };

  auto cli = std::make_unique<Cli>();
  try {
    parse(*cli, args);
  } catch (const CLI::ParseError& e) {
    return cli->app.exit(e, out, err);
  }

  try {
    if (!cli->o.config.empty()) {
      // Re-parse with config values injected for every option the command
      // line left unset, so flags > config file > defaults.
      CLI::App* sub = cli->Selected();
      std::vector<std::string> extra;
      for (const auto& [key, value] : ReadConfig(cli->o.config)) {
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config") {
          throw ValidationError("--config: unknown key '" + key + "' for '" +
                                sub->get_name() + "'");
        }
        if (opt->count() > 0) continue;
        extra.push_back("--" + key);
        extra.push_back(value);
      }
      std::vector<std::string> merged = args;
      auto pos = std::find(merged.begin(), merged.end(), sub->get_name());
      merged.insert(pos + 1, extra.begin(), extra.end());
      cli = std::make_unique<Cli>();
      try {
        parse(*cli, merged);
      } catch (const CLI::ParseError& e) {
        return cli->app.exit(e, out, err);
      }
    }
    return Dispatch(*cli, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace visor::cli
