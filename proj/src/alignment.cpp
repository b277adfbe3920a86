// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/alignment.hpp"

#include <algorithm>
#include <limits>

#include "edgeprobe/error.hpp"
#include "edgeprobe/kernels/kernels.hpp"

namespace edgeprobe {

AlignmentMatrix::AlignmentMatrix(std::size_t rows, std::size_t cols, std::vector<Cell> cells)
    : rows_(rows), cols_(cols), cells_(std::move(cells)) {
  for (const auto& [r, c] : cells_) {
    if (r >= rows_ || c >= cols_) {
      throw ShapeError("alignment cell (" + std::to_string(r) + "," + std::to_string(c) +
                       ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
  }
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

AlignmentMatrix AlignmentMatrix::identity(std::size_t n) {
  std::vector<Cell> cells;
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cells.emplace_back(i, i);
  return AlignmentMatrix(n, n, std::move(cells));
}

bool AlignmentMatrix::get(std::size_t row, std::size_t col) const {
  return std::binary_search(cells_.begin(), cells_.end(), Cell{row, col});
}

std::vector<std::uint64_t> AlignmentMatrix::row_bits() const {
  const std::size_t words = bit_words(cols_);
  std::vector<std::uint64_t> bits(rows_ * words, 0);
  for (const auto& [r, c] : cells_) bits[r * words + c / 64] |= std::uint64_t{1} << (c % 64);
  return bits;
}

std::vector<std::uint64_t> AlignmentMatrix::column_bits() const {
  const std::size_t words = bit_words(rows_);
  std::vector<std::uint64_t> bits(cols_ * words, 0);
  for (const auto& [r, c] : cells_) bits[c * words + r / 64] |= std::uint64_t{1} << (r % 64);
  return bits;
}

AlignmentMatrix byte_alignment(std::string_view source, std::string_view target) {
  const std::size_t n = target.size();
  const std::size_t m = source.size();
  const std::size_t stride = m + 1;
  // dist[i * stride + j]: edit distance between target[0, i) and source[0, j).
  std::vector<std::uint32_t> dist((n + 1) * stride);
  for (std::size_t j = 0; j <= m; ++j) dist[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    std::uint32_t* row = &dist[i * stride];
    const std::uint32_t* prev = &dist[(i - 1) * stride];
    row[0] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const std::uint32_t diag = prev[j - 1] + (target[i - 1] == source[j - 1] ? 0u : 1u);
      row[j] = std::min({diag, prev[j] + 1, row[j - 1] + 1});
    }
  }

  std::vector<AlignmentMatrix::Cell> cells;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::uint32_t here = dist[i * stride + j];
    if (i > 0 && j > 0) {
      const std::uint32_t diag = dist[(i - 1) * stride + (j - 1)];
      if (target[i - 1] == source[j - 1] && here == diag) {
        cells.emplace_back(i - 1, j - 1);
        --i;
        --j;
        continue;
      }
      if (here == diag + 1) {
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && here == dist[i * stride + (j - 1)] + 1) {
      --j;
    } else {
      --i;
    }
  }
  return AlignmentMatrix(n, m, std::move(cells));
}

AlignmentMatrix token_byte_alignment(const std::vector<std::string>& tokens,
                                     std::string_view joined) {
  if (joined != join_tokens(tokens)) {
    throw ValidationError("token_byte_alignment: string is not the space-joined token list");
  }
  std::vector<AlignmentMatrix::Cell> cells;
  cells.reserve(joined.size());
  std::size_t offset = 0;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    for (std::size_t b = 0; b < tokens[t].size(); ++b) cells.emplace_back(t, offset + b);
    offset += tokens[t].size() + 1;
  }
  return AlignmentMatrix(tokens.size(), joined.size(), std::move(cells));
}

AlignmentMatrix compose(const AlignmentMatrix& u, const AlignmentMatrix& a,
                        const AlignmentMatrix& v) {
  if (u.cols() != a.rows() || a.cols() != v.cols()) {
    throw ShapeError("compose: inner dimensions disagree (" + std::to_string(u.rows()) + "x" +
                     std::to_string(u.cols()) + " * " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " * (" + std::to_string(v.rows()) + "x" +
                     std::to_string(v.cols()) + ")^T)");
  }
  const auto& k = kernels::active();
  const std::size_t words = bit_words(a.cols());
  const std::vector<std::uint64_t> a_rows = a.row_bits();
  const std::vector<std::uint64_t> v_rows = v.row_bits();

  std::vector<AlignmentMatrix::Cell> cells;
  std::vector<std::uint64_t> reach(words);
  auto it = u.cells().begin();
  for (std::size_t t = 0; t < u.rows(); ++t) {
    std::fill(reach.begin(), reach.end(), 0);
    bool any = false;
    for (; it != u.cells().end() && it->first == t; ++it) {
      k.bits_or(reach.data(), a_rows.data() + it->second * words, words);
      any = true;
    }
    if (!any) continue;
    for (std::size_t s = 0; s < v.rows(); ++s) {
      if (k.bits_intersect(reach.data(), v_rows.data() + s * words, words)) {
        cells.emplace_back(t, s);
      }
    }
  }
  return AlignmentMatrix(u.rows(), v.rows(), std::move(cells));
}

AlignmentMatrix align_tokens(const std::vector<std::string>& source_tokens,
                             const std::vector<std::string>& target_tokens) {
  const std::string source = join_tokens(source_tokens);
  const std::string target = join_tokens(target_tokens);
  return compose(token_byte_alignment(target_tokens, target), byte_alignment(source, target),
                 token_byte_alignment(source_tokens, source));
}

Span project_span(const Span& span, const AlignmentMatrix& alignment) {
  if (span.start >= span.end || span.end > alignment.cols()) {
    throw ValidationError("project_span: span [" + std::to_string(span.start) + "," +
                          std::to_string(span.end) + ") invalid for " +
                          std::to_string(alignment.cols()) + " source tokens");
  }
  std::size_t lo = std::numeric_limits<std::size_t>::max();
  std::size_t hi = 0;
  bool hit = false;
  for (const auto& [t, s] : alignment.cells()) {
    if (s >= span.start && s < span.end) {
      lo = std::min(lo, t);
      hi = std::max(hi, t);
      hit = true;
    }
  }
  if (!hit) {
    throw UnalignedSpan("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                        ") has no aligned target tokens");
  }
  return Span{static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi + 1)};
}

namespace {

// Projects every target of `ex`; false if any span fails.
bool project_example(const EdgeExample& ex, std::vector<std::string> tokens, EdgeExample& out,
                     std::size_t& unaligned) {
  const AlignmentMatrix a = align_tokens(ex.tokens, tokens);
  out.text = ex.text;
  out.info = ex.info;
  out.tokens = std::move(tokens);
  out.targets.clear();
  bool ok = true;
  for (const auto& t : ex.targets) {
    Target projected = t;
    try {
      projected.span1 = project_span(t.span1, a);
      if (t.span2) projected.span2 = project_span(*t.span2, a);
    } catch (const UnalignedSpan&) {
      ++unaligned;
      ok = false;
      continue;
    }
    out.targets.push_back(std::move(projected));
  }
  return ok;
}

template <typename TokensFor>
Split retokenize_impl(const Split& examples, TokensFor&& tokens_for, RetokenizeReport* report) {
  RetokenizeReport local;
  local.examples_in = examples.size();
  Split out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    EdgeExample projected;
    if (project_example(examples[i], tokens_for(i), projected, local.unaligned_targets)) {
      out.push_back(std::move(projected));
    } else {
      ++local.dropped_examples;
      local.dropped_indices.push_back(i);
    }
  }
  local.examples_out = out.size();
  if (report != nullptr) *report = std::move(local);
  return out;
}

}  // namespace

Split retokenize_dataset(const Split& examples, const TokenizerAdapter& adapter,
                         RetokenizeReport* report) {
  return retokenize_impl(
      examples, [&](std::size_t i) { return adapter(join_tokens(examples[i].tokens)); }, report);
}

Split retokenize_dataset(const Split& examples,
                         const std::vector<std::vector<std::string>>& target_tokens,
                         RetokenizeReport* report) {
  if (target_tokens.size() != examples.size()) {
    throw ValidationError("parallel token file has " + std::to_string(target_tokens.size()) +
                          " sentences, dataset has " + std::to_string(examples.size()));
  }
  return retokenize_impl(examples, [&](std::size_t i) { return target_tokens[i]; }, report);
}

}  // namespace edgeprobe
