// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Micro-averaged binary F1 over (target, label) decisions, with label-set
// and span-distance slices and normal-approximation confidence intervals.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "json.hpp"

namespace edgeprobe {

inline constexpr double kDefaultThreshold = 0.5;

struct LabelCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  LabelCounts& operator+=(const LabelCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

struct ConfusionCounts {
  std::vector<std::string> labels;
  std::vector<LabelCounts> per_label;
  std::uint64_t n_targets = 0;

  LabelCounts total() const;
  // Sum over `subset`; throws UnknownLabel for labels not in `labels`.
  LabelCounts total(std::span<const std::string> subset) const;
};

// A prediction is positive iff p >= threshold. Throws ShapeError when the
// lists or vectors disagree in length. Gold vectors may be longer than the
// prediction vectors; the extra positions (labels the probe cannot
// predict) count as negatives.
ConfusionCounts count(const std::vector<std::vector<double>>& predictions,
                      const std::vector<std::vector<std::uint8_t>>& golds,
                      const std::vector<std::string>& labels, double threshold = kDefaultThreshold);

// 2PR / (P + R), 0 when a denominator vanishes.
double f1_score(const LabelCounts& counts);
double micro_f1(const ConfusionCounts& counts);
double micro_f1(const ConfusionCounts& counts, std::span<const std::string> subset);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// f1 +- 1.96 sqrt(f1 (1 - f1) / n), clipped to [0, 1]. Throws Error for n == 0.
ConfidenceInterval normal_ci(double f1, std::uint64_t n);

// Gap between two spans: start of the later span minus end of the earlier
// one, 0 when they touch or overlap.
std::uint32_t span_distance(const Span& a, const Span& b);

struct SliceReport {
  std::string name;
  LabelCounts counts;
  double f1 = 0.0;
  std::uint64_t n = 0;
  std::optional<ConfidenceInterval> ci;
};

// Buckets 0..max_bucket then one overflow bucket ("<max_bucket+1>+").
// Throws ValidationError when a target lacks span2.
std::vector<SliceReport> stratify_by_distance(const std::vector<Target>& targets,
                                              const std::vector<std::vector<double>>& predictions,
                                              const std::vector<std::vector<std::uint8_t>>& golds,
                                              const std::vector<std::string>& labels,
                                              std::uint32_t max_bucket,
                                              double threshold = kDefaultThreshold);

struct EvalOptions {
  double threshold = kDefaultThreshold;
  bool by_label = false;
  // slice name -> labels
  std::vector<std::pair<std::string, std::vector<std::string>>> label_sets;
  std::optional<std::uint32_t> max_distance;
};

struct EvalReport {
  double threshold = kDefaultThreshold;
  std::uint64_t n = 0;
  LabelCounts counts;
  double micro_f1 = 0.0;
  std::optional<ConfidenceInterval> ci;
  std::vector<SliceReport> labels;
  std::vector<SliceReport> label_sets;
  std::vector<SliceReport> distance;
};

EvalReport evaluate(const std::vector<Target>& targets,
                    const std::vector<std::vector<double>>& predictions,
                    const std::vector<std::vector<std::uint8_t>>& golds,
                    const std::vector<std::string>& labels, const EvalOptions& options);

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);
std::string to_text(const EvalReport& report);
// Header plus one row per distance bucket.
std::string distance_csv(const EvalReport& report);

struct RunSpread {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t runs = 0;
};

RunSpread summarize(std::span<const double> values);

struct MultiRunSummary {
  RunSpread micro_f1;
  std::map<std::string, RunSpread> slices;  // label_sets and labels by name
};

// Throws Error on an empty list.
MultiRunSummary multi_run_average(const std::vector<EvalReport>& reports);

// Expands "ARG0..ARG5" (numeric suffix range), "ARGM-*" (prefix glob) or a
// comma-separated list. Ranges and globs keep only labels in `available`.
std::vector<std::string> expand_label_pattern(const std::string& pattern,
                                              const std::vector<std::string>& available);

}  // namespace edgeprobe
