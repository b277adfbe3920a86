// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Config-driven experiment runs: building representations for an encoder
// mode, training, evaluating and writing a run directory.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "edgeprobe/encoders.hpp"
#include "edgeprobe/evaluation.hpp"
#include "edgeprobe/probe.hpp"
#include "edgeprobe/trainer.hpp"

namespace edgeprobe {

enum class EncoderMode { kLexical, kCnn1, kCnn2, kOrtho, kMix, kCat, kDirect };

std::string to_string(EncoderMode mode);
EncoderMode encoder_mode_from_string(const std::string& name);

// Flat key=value settings. Recognized keys:
//   name task encoder seed encoder_seed
//   train dev test activations.train activations.dev activations.test
//   embeddings ("path" or "random:<dim>")
//   eval_interval max_steps lr batch_size clip_norm threshold
//   projection_dim mlp_hidden_dim state_dim ortho_layers max_distance
//   output_dir
class ExperimentConfig {
 public:
  ExperimentConfig() = default;

  // '#' comments and blank lines are ignored. Throws ValidationError on a
  // malformed line or unknown key.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);

  // "key=value"; later settings replace earlier ones.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback = "") const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  // Sorted key=value lines.
  std::string to_text() const;

  std::string name() const { return get("name", get("encoder", "run")); }
  EncoderMode encoder() const;
  TrainOptions train_options() const;

  // Relative paths resolve against this directory.
  std::filesystem::path base_dir;

  std::filesystem::path path(const std::string& key) const;

 private:
  std::map<std::string, std::string> values_;
};

// Checks required keys for the encoder mode and that referenced files exist.
// Throws ValidationError.
void validate_config(const ExperimentConfig& config);

// Per-sentence inputs for the probe under the configured encoder mode.
struct Representations {
  std::vector<ActivationSet> sets;
  std::size_t input_dim = 0;
  std::size_t n_layers = 0;
};

// `split_name` is "train", "dev" or "test"; `acts_override` replaces
// activations.<split_name>. Throws ValidationError on a layer count the mode
// cannot use (mix needs at least 2 layers, cat at least 2).
Representations build_representations(const ExperimentConfig& config, const Split& examples,
                                      const std::string& split_name,
                                      const std::optional<std::filesystem::path>& acts_override = std::nullopt);

ProbeConfig probe_config_for(const ExperimentConfig& config, const Representations& reps,
                             std::size_t n_labels, bool two_span);

// Gold vectors are binarized against `vocab`.
std::vector<TrainingSentence> training_sentences(const Split& examples,
                                                 const std::vector<ActivationSet>& sets,
                                                 const LabelVocabulary& vocab);

// Predicts every target and evaluates with the extended label vocabulary.
EvalReport evaluate_split(const Probe& probe, const Split& examples,
                          const std::vector<ActivationSet>& sets, const LabelVocabulary& vocab,
                          const EvalOptions& options);

struct RunSummary {
  std::filesystem::path run_dir;
  TrainResult train;
  EvalReport report;
};

// Trains and writes run_dir:
//   config.txt labels.txt probe.json checkpoint.epp train_log.jsonl report.json
// The report covers the test split when configured, else dev. Throws Error
// if run_dir already exists.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& run_dir);

struct LoadedRun {
  ExperimentConfig config;
  LabelVocabulary vocab;
  ProbeConfig probe_config;
  ProbeParameters params;
};

LoadedRun load_run(const std::filesystem::path& run_dir);

nlohmann::ordered_json to_json(const ProbeConfig& config);
ProbeConfig probe_config_from_json(const nlohmann::json& j);

// One row per run name, averaged over runs sharing the name.
struct ComparisonRow {
  std::string name;
  RunSpread f1;
  std::optional<double> delta;  // mean F1 minus the baseline's mean
};

// Rows in first-seen order of `names`. Without a baseline, or for the
// baseline itself, delta is empty. Throws Error if the baseline is absent.
std::vector<ComparisonRow> compare_runs(const std::vector<std::string>& names,
                                        const std::vector<EvalReport>& reports,
                                        const std::optional<std::string>& baseline);
std::string comparison_text(const std::vector<ComparisonRow>& rows);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

}  // namespace edgeprobe
