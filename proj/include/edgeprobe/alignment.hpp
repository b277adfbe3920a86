// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Span projection across tokenizations. Source and target token lists are
// joined with single spaces, the two strings are aligned byte-by-byte with
// a minimal edit script, and the token-to-byte and byte-to-byte relations
// are composed into a token-to-token boolean matrix.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "edgeprobe/tokenizers.hpp"

namespace edgeprobe {

// Sparse boolean matrix. Cells are kept sorted by (row, col) and unique.
class AlignmentMatrix {
 public:
  using Cell = std::pair<std::size_t, std::size_t>;

  AlignmentMatrix() = default;
  AlignmentMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  // Throws ShapeError if a cell is out of bounds.
  AlignmentMatrix(std::size_t rows, std::size_t cols, std::vector<Cell> cells);

  static AlignmentMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Cell>& cells() const { return cells_; }
  bool get(std::size_t row, std::size_t col) const;

  // Row-major bitsets, ceil(cols/64) words per row.
  std::vector<std::uint64_t> row_bits() const;
  // Bitsets of the transpose: one row per column of this matrix.
  std::vector<std::uint64_t> column_bits() const;

  friend bool operator==(const AlignmentMatrix&, const AlignmentMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Cell> cells_;
};

inline std::size_t bit_words(std::size_t bits) { return (bits + 63) / 64; }

// Rows index target bytes, columns source bytes. A cell is set iff both
// bytes sit in the same run of matches of the canonical minimal edit
// script. Ties in the traceback prefer match, then substitute, then
// delete (drop a source byte), then insert (emit a target byte).
AlignmentMatrix byte_alignment(std::string_view source, std::string_view target);

// tokens x bytes: token t covers its own bytes in `joined`; separators map
// to no token. Throws ValidationError unless joined == join_tokens(tokens).
AlignmentMatrix token_byte_alignment(const std::vector<std::string>& tokens,
                                     std::string_view joined);

// U * A * V^T as a boolean product: (target tokens x target bytes) *
// (target bytes x source bytes) * (source tokens x source bytes)^T.
AlignmentMatrix compose(const AlignmentMatrix& target_tokens_to_bytes,
                        const AlignmentMatrix& byte_alignment,
                        const AlignmentMatrix& source_tokens_to_bytes);

// Token-to-token alignment (target tokens x source tokens).
AlignmentMatrix align_tokens(const std::vector<std::string>& source_tokens,
                             const std::vector<std::string>& target_tokens);

// Projects a source-side span through a target x source alignment.
// Throws UnalignedSpan when nothing on the target side is reached.
Span project_span(const Span& span, const AlignmentMatrix& alignment);

struct RetokenizeReport {
  std::size_t examples_in = 0;
  std::size_t examples_out = 0;
  std::size_t dropped_examples = 0;
  std::size_t unaligned_targets = 0;
  std::vector<std::size_t> dropped_indices;
};

// Replaces each example's tokens with `adapter` applied to the joined
// source tokens and projects every target. Examples with an unalignable
// span are dropped and counted.
Split retokenize_dataset(const Split& examples, const TokenizerAdapter& adapter,
                         RetokenizeReport* report = nullptr);

// Same, with target tokenizations supplied per example (parallel lists).
Split retokenize_dataset(const Split& examples,
                         const std::vector<std::vector<std::string>>& target_tokens,
                         RetokenizeReport* report = nullptr);

}  // namespace edgeprobe
