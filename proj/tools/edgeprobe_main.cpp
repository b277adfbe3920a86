// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// edgeprobe: convert, align, train, eval and report subcommands.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgeprobe/alignment.hpp"
#include "edgeprobe/converters.hpp"
#include "edgeprobe/core_model.hpp"
#include "edgeprobe/error.hpp"
#include "edgeprobe/evaluation.hpp"
#include "edgeprobe/experiment.hpp"
#include "edgeprobe/tokenizers.hpp"

namespace fs = std::filesystem;
using namespace edgeprobe;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Missing inputs and bad arguments map to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw UsageError("no such file: " + p.string());
}

struct ConvertArgs {
  std::string format;
  std::string task;
  std::string in;
  std::string out;
  bool keep_root = false;
  bool full_document = false;
};

int cmd_convert(const ConvertArgs& a) {
  require_file(a.in);
  Split split;
  if (a.format == "conllu") {
    split = from_conllu(fs::path(a.in), ConlluOptions{a.keep_root});
  } else if (a.format == "bracketed") {
    auto both = from_bracketed(fs::path(a.in));
    if (a.task == "pos") {
      split = std::move(both.pos);
    } else if (a.task == "const" || a.task == "constituents" || a.task == "nonterminal") {
      split = std::move(both.constituents);
    } else {
      throw UsageError("bracketed format needs --task pos or --task const");
    }
  } else if (a.format == "span-tsv") {
    const bool binary = a.task == "srl" || a.task == "spr" || a.task == "winograd" || a.task == "binary" ||
                        a.task == "dpr" || a.task == "spr1" || a.task == "spr2";
    split = from_span_tsv(fs::path(a.in), binary);
  } else if (a.format == "cluster-json") {
    std::optional<std::uint32_t> window = 1;
    if (a.full_document) window.reset();
    split = from_cluster_json(fs::path(a.in), window);
  } else if (a.format == "relation-tsv") {
    split = from_relation_tsv(fs::path(a.in));
  } else {
    throw UsageError("unknown format '" + a.format + "'");
  }
  if (auto problems = validate(split); !problems.empty()) throw ValidationError(problems.front());
  write_jsonl(split, fs::path(a.out));
  auto stats = to_json(dataset_stats(split));
  stats["task"] = a.task;
  stats["format"] = a.format;
  std::cout << stats.dump() << "\n";
  return kOk;
}

struct AlignArgs {
  std::string in;
  std::string out;
  std::string adapter;
  std::string tokens;
  std::string vocab;
  bool lowercase = false;
};

int cmd_align(const AlignArgs& a) {
  require_file(a.in);
  if (a.adapter.empty() == a.tokens.empty()) throw UsageError("give exactly one of --adapter or --tokens");
  const Split split = read_jsonl(fs::path(a.in));
  RetokenizeReport report;
  Split out;
  if (!a.tokens.empty()) {
    require_file(a.tokens);
    out = retokenize_dataset(split, read_token_file(fs::path(a.tokens)), &report);
  } else {
    if (a.adapter == "wordpiece-file") {
      if (a.vocab.empty()) throw UsageError("wordpiece-file needs --vocab");
      require_file(a.vocab);
    } else if (a.adapter != "whitespace" && a.adapter != "moses-like") {
      throw UsageError("unknown adapter '" + a.adapter + "'");
    }
    out = retokenize_dataset(split, make_adapter(a.adapter, AdapterOptions{a.vocab, a.lowercase}), &report);
  }
  write_jsonl(out, fs::path(a.out));
  nlohmann::ordered_json j;
  j["examples_in"] = report.examples_in;
  j["examples_out"] = report.examples_out;
  j["dropped_examples"] = report.dropped_examples;
  j["unaligned_targets"] = report.unaligned_targets;
  std::cout << j.dump() << "\n";
  return kOk;
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
};

int cmd_train(const TrainArgs& a) {
  require_file(a.config);
  ExperimentConfig config;
  try {
    config = ExperimentConfig::load(a.config);
    for (const auto& o : a.overrides) config.set(o);
    validate_config(config);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  fs::path run_dir;
  if (!a.out.empty()) {
    run_dir = a.out;
  } else if (config.has("output_dir")) {
    run_dir = config.path("output_dir");
  } else {
    throw UsageError("no run directory: pass --out or set output_dir");
  }
  if (fs::exists(run_dir)) throw UsageError("run directory already exists: " + run_dir.string());
  const RunSummary summary = run_experiment(config, run_dir);
  nlohmann::ordered_json j;
  j["run_dir"] = run_dir.string();
  j["steps"] = summary.train.steps;
  j["best_step"] = summary.train.best_step;
  j["best_dev_f1"] = summary.train.best_dev_f1;
  j["early_stopped"] = summary.train.early_stopped;
  j["micro_f1"] = summary.report.micro_f1;
  std::cout << j.dump() << "\n";
  return kOk;
}

struct EvalArgs {
  std::string run;
  std::string data;
  std::string acts;
  bool by_label = false;
  std::optional<std::uint32_t> by_distance;
  std::vector<std::string> label_sets;
  double threshold = kDefaultThreshold;
  bool csv = false;
  bool text = false;
  std::string out;
};

int cmd_eval(const EvalArgs& a) {
  if (!fs::is_directory(a.run)) throw UsageError("no such run directory: " + a.run);
  const LoadedRun run = load_run(a.run);
  std::string split_name = run.config.has("test") ? "test" : "dev";
  Split data;
  if (!a.data.empty()) {
    require_file(a.data);
    data = read_jsonl(fs::path(a.data));
  } else {
    data = read_jsonl(run.config.path(split_name));
  }
  std::optional<fs::path> acts;
  if (!a.acts.empty()) {
    require_file(a.acts);
    acts = a.acts;
  }
  if (auto problems = validate(data); !problems.empty()) throw ValidationError(problems.front());
  const Representations reps = build_representations(run.config, data, split_name, acts);
  if (!reps.sets.empty() && (reps.input_dim != run.probe_config.input_dim || reps.n_layers != run.probe_config.n_layers)) {
    throw ShapeError("activations do not match the checkpoint's input shape");
  }
  const LabelVocabulary vocab = run.vocab.extended_with(data);
  EvalOptions options;
  options.threshold = a.threshold;
  options.by_label = a.by_label;
  options.max_distance = a.by_distance;
  for (const auto& spec : a.label_sets) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--label-set expects name=pattern, got '" + spec + "'");
    options.label_sets.emplace_back(spec.substr(0, eq), expand_label_pattern(spec.substr(eq + 1), vocab.labels()));
  }
  const Probe probe(run.probe_config, run.params);
  const EvalReport report = evaluate_split(probe, data, reps.sets, vocab, options);
  std::string rendered;
  if (a.csv) {
    if (!a.by_distance) throw UsageError("--csv needs --by-distance");
    rendered = distance_csv(report);
  } else if (a.text) {
    rendered = to_text(report);
  } else {
    rendered = to_json(report).dump(2) + "\n";
  }
  if (a.out.empty()) {
    std::cout << rendered;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw Error("cannot write " + a.out);
    out << rendered;
  }
  return kOk;
}

struct ReportArgs {
  std::vector<std::string> runs;
  std::string baseline;
  bool csv = false;
};

int cmd_report(const ReportArgs& a) {
  std::vector<std::string> names;
  std::vector<EvalReport> reports;
  for (const auto& r : a.runs) {
    const fs::path p = fs::is_directory(r) ? fs::path(r) / "report.json" : fs::path(r);
    require_file(p);
    std::ifstream in(p);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(p.string() + ": " + e.what());
    }
    names.push_back(j.value("name", p.parent_path().filename().string()));
    reports.push_back(eval_report_from_json(j));
  }
  std::optional<std::string> baseline;
  if (!a.baseline.empty()) baseline = a.baseline;
  const auto rows = compare_runs(names, reports, baseline);
  std::cout << (a.csv ? comparison_csv(rows) : comparison_text(rows));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgeprobe: span-level probing of token representations"};
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* c = app.add_subcommand("convert", "convert annotations to edge-probing JSONL");
  c->add_option("--format", convert.format, "conllu | bracketed | span-tsv | cluster-json | relation-tsv")->required();
  c->add_option("--task", convert.task, "task name")->required();
  c->add_option("input", convert.in)->required();
  c->add_option("output", convert.out)->required();
  c->add_flag("--keep-root", convert.keep_root, "emit root dependencies");
  c->add_flag("--full-document", convert.full_document, "coreference pairs across the whole document");

  AlignArgs align;
  auto* al = app.add_subcommand("align", "retokenize a dataset and project its spans");
  al->add_option("input", align.in)->required();
  al->add_option("output", align.out)->required();
  al->add_option("--adapter", align.adapter, "whitespace | moses-like | wordpiece-file");
  al->add_option("--tokens", align.tokens, "parallel token file");
  al->add_option("--vocab", align.vocab, "wordpiece vocabulary");
  al->add_flag("--lowercase", align.lowercase);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "train a probe from a config file");
  t->add_option("--config", train.config)->required();
  t->add_option("--out", train.out, "run directory (default: output_dir)");
  t->add_option("overrides", train.overrides, "key=value settings");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "evaluate a trained run");
  e->add_option("--run", eval.run)->required();
  e->add_option("--data", eval.data, "JSONL to evaluate (default: the run's test or dev split)");
  e->add_option("--acts", eval.acts, "activation file paired with --data");
  e->add_flag("--by-label", eval.by_label);
  e->add_option("--by-distance", eval.by_distance, "max distance bucket");
  e->add_option("--label-set", eval.label_sets, "name=pattern, e.g. core=ARG0..ARG5");
  e->add_option("--threshold", eval.threshold);
  e->add_flag("--csv", eval.csv, "distance buckets as CSV");
  e->add_flag("--text", eval.text, "plain-text table");
  e->add_option("--out", eval.out, "write to a file instead of stdout");

  ReportArgs report;
  auto* r = app.add_subcommand("report", "compare runs against a baseline");
  r->add_option("runs", report.runs, "run directories or report.json files")->required();
  r->add_option("--baseline", report.baseline, "baseline run name");
  r->add_flag("--csv", report.csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c->parsed()) return cmd_convert(convert);
    if (al->parsed()) return cmd_align(align);
    if (t->parsed()) return cmd_train(train);
    if (e->parsed()) return cmd_eval(eval);
    if (r->parsed()) return cmd_report(report);
  } catch (const UsageError& err) {
    std::cerr << "edgeprobe: " << err.what() << "\n";
    return kUsage;
  } catch (const std::exception& err) {
    std::cerr << "edgeprobe: " << err.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
