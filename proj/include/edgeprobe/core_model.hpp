// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Edge-probing data model: sentences with tokens and labeled span(-pair)
// targets, plus the JSONL serialization used by every tool.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace edgeprobe {

// End-exclusive token interval [start, end).
struct Span {
  std::uint32_t start = 0;
  std::uint32_t end = 0;

  std::uint32_t width() const { return end - start; }
  bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

struct Target {
  Span span1;
  std::optional<Span> span2;
  // Distinct, nonempty labels. Empty list = explicit negative.
  std::vector<std::string> labels;

  bool is_binary() const { return span2.has_value(); }
  friend bool operator==(const Target&, const Target&) = default;
};

struct EdgeExample {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<Target> targets;
  nlohmann::ordered_json info = nlohmann::ordered_json::object();

  friend bool operator==(const EdgeExample&, const EdgeExample&) = default;
};

using Split = std::vector<EdgeExample>;

class LabelVocabulary {
 public:
  LabelVocabulary() = default;
  // Sorted, deduplicated copy of `labels`.
  explicit LabelVocabulary(std::vector<std::string> labels);

  // Lexicographically sorted set of every label appearing in `examples`.
  static LabelVocabulary from_split(const Split& examples);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  std::optional<std::size_t> find(const std::string& label) const;
  // Throws UnknownLabel.
  std::size_t index(const std::string& label) const;

  // This vocabulary followed by the sorted labels of `examples` it lacks.
  LabelVocabulary extended_with(const Split& examples) const;

  friend bool operator==(const LabelVocabulary& a, const LabelVocabulary& b) {
    return a.labels_ == b.labels_;
  }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct TaskDataset {
  std::string task;
  Split train;
  Split dev;
  Split test;
  LabelVocabulary vocab;  // built from train

  // Labels present in dev/test but absent from the train vocabulary.
  std::vector<std::string> unseen_labels() const;
};

// Multi-hot vector: 1 exactly at the positions of target.labels.
std::vector<std::uint8_t> binarize(const Target& target, const LabelVocabulary& vocab);

// One violation message per broken invariant; empty iff the split is clean.
std::vector<std::string> validate(const Split& examples);
std::vector<std::string> validate(const TaskDataset& dataset);

// JSONL (one object per line).
nlohmann::ordered_json to_json(const EdgeExample& example);
EdgeExample example_from_json(const nlohmann::ordered_json& object);
std::string to_jsonl_line(const EdgeExample& example);

// Throws FormatError with the 1-based line number on malformed lines and
// ValidationError on out-of-range spans.
Split read_jsonl(std::istream& in);
Split read_jsonl(const std::filesystem::path& path);
void write_jsonl(const Split& examples, std::ostream& out);
void write_jsonl(const Split& examples, const std::filesystem::path& path);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace edgeprobe
