// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Synthetic tagging tasks with a known labeling rule.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "edgeprobe/core_model.hpp"

namespace edgeprobe::synthetic {

enum class Rule {
  kSelf,           // label of token i comes from token i
  kRightNeighbor,  // label of token i comes from token i + 1
};

struct Options {
  Rule rule = Rule::kSelf;
  std::size_t vocab_size = 20;
  std::size_t n_labels = 3;
  std::size_t train_sentences = 1000;
  std::size_t dev_sentences = 200;
  std::size_t targets_per_sentence = 2;
  std::uint32_t min_length = 4;
  std::uint32_t max_length = 10;
  std::uint64_t seed = 1;
};

// Tokens are "w0".."w{V-1}"; word wk carries class "C{k mod n_labels}".
std::string word(std::size_t id);
std::string label_of_word(const std::string& w, std::size_t n_labels);

struct Task {
  Split train;
  Split dev;
};

Task make_task(const Options& options);

// Two-span variant: label "1" iff both spans' words share a class.
Task make_pair_task(const Options& options);

}  // namespace edgeprobe::synthetic
