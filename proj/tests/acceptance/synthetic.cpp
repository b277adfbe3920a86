// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "acceptance/synthetic.hpp"

#include <algorithm>
#include <random>

namespace edgeprobe::synthetic {

std::string word(std::size_t id) { return "w" + std::to_string(id); }

std::string label_of_word(const std::string& w, std::size_t n_labels) {
  return "C" + std::to_string(std::stoul(w.substr(1)) % n_labels);
}

namespace {

EdgeExample sentence(const Options& o, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> len(o.min_length, o.max_length);
  std::uniform_int_distribution<std::size_t> vocab(0, o.vocab_size - 1);
  EdgeExample ex;
  const std::uint32_t n = len(rng);
  for (std::uint32_t i = 0; i < n; ++i) ex.tokens.push_back(word(vocab(rng)));
  ex.text = join_tokens(ex.tokens);
  return ex;
}

Split unary_split(const Options& o, std::size_t count, std::mt19937_64& rng) {
  Split out;
  for (std::size_t s = 0; s < count; ++s) {
    EdgeExample ex = sentence(o, rng);
    const auto n = static_cast<std::uint32_t>(ex.tokens.size());
    const std::uint32_t usable = o.rule == Rule::kRightNeighbor ? n - 1 : n;
    std::vector<std::uint32_t> positions(usable);
    for (std::uint32_t i = 0; i < usable; ++i) positions[i] = i;
    std::shuffle(positions.begin(), positions.end(), rng);
    positions.resize(std::min<std::size_t>(positions.size(), o.targets_per_sentence));
    std::sort(positions.begin(), positions.end());
    for (std::uint32_t i : positions) {
      const std::uint32_t source = o.rule == Rule::kRightNeighbor ? i + 1 : i;
      ex.targets.push_back({Span{i, i + 1}, std::nullopt, {label_of_word(ex.tokens[source], o.n_labels)}});
    }
    out.push_back(std::move(ex));
  }
  return out;
}

Split pair_split(const Options& o, std::size_t count, std::mt19937_64& rng) {
  Split out;
  for (std::size_t s = 0; s < count; ++s) {
    EdgeExample ex = sentence(o, rng);
    const auto n = static_cast<std::uint32_t>(ex.tokens.size());
    for (std::size_t t = 0; t < o.targets_per_sentence; ++t) {
      const auto a = static_cast<std::uint32_t>(rng() % n);
      const auto b = static_cast<std::uint32_t>(rng() % n);
      const bool same = label_of_word(ex.tokens[a], o.n_labels) == label_of_word(ex.tokens[b], o.n_labels);
      ex.targets.push_back({Span{a, a + 1}, Span{b, b + 1}, {same ? "1" : "0"}});
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace

Task make_task(const Options& options) {
  std::mt19937_64 rng(options.seed);
  Task task;
  task.train = unary_split(options, options.train_sentences, rng);
  task.dev = unary_split(options, options.dev_sentences, rng);
  return task;
}

Task make_pair_task(const Options& options) {
  std::mt19937_64 rng(options.seed);
  Task task;
  task.train = pair_split(options, options.train_sentences, rng);
  task.dev = pair_split(options, options.dev_sentences, rng);
  return task;
}

}  // namespace edgeprobe::synthetic
