// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Converters from common annotation formats to edge-probing examples.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "json.hpp"

namespace edgeprobe {

// ---- CoNLL-U dependencies ------------------------------------------------

struct ConlluOptions {
  // Root-headed tokens get span2 = span1 and label "root" instead of being dropped.
  bool keep_root = false;
};

// One example per sentence; per non-root token a target
// {span1 = dependent, span2 = head, label = deprel}. Multiword-token and
// empty-node lines are skipped. Throws FormatError (with line number) on
// malformed lines and ValidationError on cyclic or out-of-range heads.
Split from_conllu(std::istream& in, const ConlluOptions& options = {});
Split from_conllu(const std::filesystem::path& path, const ConlluOptions& options = {});

// ---- Bracketed constituency trees ----------------------------------------

struct ParseTree {
  std::string label;
  std::string word;  // leaves only
  std::vector<ParseTree> children;

  bool is_leaf() const { return children.empty(); }
  bool is_preterminal() const { return children.size() == 1 && children[0].is_leaf(); }
};

// Reads every tree in a stream of s-expressions. Throws FormatError on
// unbalanced brackets.
std::vector<ParseTree> parse_bracketed(std::string_view text);

// "NP-SBJ-1" -> "NP", "PP-LOC=2" -> "PP"; labels such as "-NONE-" or
// "-LRB-" are returned unchanged.
std::string strip_function_tags(const std::string& label);

struct BracketedDatasets {
  Split pos;
  Split constituents;
};

// POS: one [i, i+1) target per token. Constituents: one [i, j) target per
// nonterminal above the preterminals. Empty elements (-NONE-) are removed.
BracketedDatasets from_bracketed(std::string_view text);
BracketedDatasets from_bracketed(const std::filesystem::path& path);

// ---- Coreference ---------------------------------------------------------

struct MentionCluster {
  std::string document_id;
  std::vector<std::vector<Span>> clusters;
};

struct CorefScope {
  // Mention sentence index per span, used by the window filter. Empty means
  // every mention is in sentence 0.
  std::vector<std::pair<Span, std::uint32_t>> sentence_of;
  // Keep pairs whose sentences differ by at most this much; nullopt keeps all.
  std::optional<std::uint32_t> max_sentence_distance;
};

// Positives: within-cluster pairs, label "1". Negatives: every other pair,
// label "0". Identical mentions are deduplicated; span1 precedes span2 in
// (start, end) order.
std::vector<Target> coref_pairs(const MentionCluster& clusters, const CorefScope& scope = {});

// JSON lines: {"doc_id": str, "sentences": [[tok...]...],
//              "clusters": [[[sent, start, end], ...], ...]}
// with sentence-relative end-exclusive token offsets. One example per
// document with all sentences concatenated.
Split from_cluster_json(std::istream& in, std::optional<std::uint32_t> max_sentence_distance = 1);
Split from_cluster_json(const std::filesystem::path& path,
                        std::optional<std::uint32_t> max_sentence_distance = 1);

// ---- Span TSV (entities, SRL, SPR, Winograd) ------------------------------

// Sentence rows:  <id> TAB <space-separated tokens>
// Unary targets:  <id> TAB start TAB end TAB labels
// Binary targets: <id> TAB s1 start TAB s1 end TAB s2 start TAB s2 end TAB labels
// Labels are pipe-separated; an empty field is an empty label set. Lines
// starting with '#' are comments.
Split from_span_tsv(std::istream& in, bool binary);
Split from_span_tsv(const std::filesystem::path& path, bool binary);

// ---- Relation classification ---------------------------------------------

// <id> TAB <sentence with <e1>..</e1> and <e2>..</e2> markers> TAB <label>
// The sentence may be wrapped in double quotes. Throws FormatError when a
// marker is missing.
Split from_relation_tsv(std::istream& in);
Split from_relation_tsv(const std::filesystem::path& path);

// ---- Statistics ------------------------------------------------------------

struct DatasetStats {
  std::uint64_t examples = 0;
  std::uint64_t tokens = 0;
  std::uint64_t targets = 0;
  std::uint64_t labels = 0;  // distinct labels

  friend bool operator==(const DatasetStats&, const DatasetStats&) = default;
};

DatasetStats dataset_stats(const Split& split);
nlohmann::ordered_json to_json(const DatasetStats& stats);

}  // namespace edgeprobe
