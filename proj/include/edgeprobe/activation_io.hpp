// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// "EPA1" activation files (little-endian):
//   magic "EPA1", u32 n_layers, u32 dim,
//   then until EOF per sentence: u32 sentence_index, u32 n_tokens,
//   n_layers * n_tokens * dim float32 values in [layer][token][dim] order.
// sentence_index is the 0-based line number of the paired JSONL record.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "edgeprobe/encoders.hpp"

namespace edgeprobe {

struct ActivationRecord {
  std::uint32_t sentence_index = 0;
  ActivationSet acts;
};

class ActivationWriter {
 public:
  ActivationWriter(std::ostream& out, std::uint32_t n_layers, std::uint32_t dim);
  // Throws ShapeError on header mismatch, ValidationError on non-finite values.
  void write(std::uint32_t sentence_index, const ActivationSet& acts);

 private:
  std::ostream* out_;
  std::uint32_t n_layers_;
  std::uint32_t dim_;
};

class ActivationReader {
 public:
  // Reads and checks the header. Throws FormatError on bad magic or zero dims.
  explicit ActivationReader(std::istream& in);

  std::uint32_t n_layers() const { return n_layers_; }
  std::uint32_t dim() const { return dim_; }
  // nullopt at EOF. Throws FormatError on truncation or non-finite values.
  std::optional<ActivationRecord> next();

 private:
  std::istream* in_;
  std::uint32_t n_layers_ = 0;
  std::uint32_t dim_ = 0;
};

std::vector<ActivationRecord> read_activation_file(const std::filesystem::path& path);
void write_activation_file(const std::filesystem::path& path, std::uint32_t n_layers,
                           std::uint32_t dim, const std::vector<ActivationRecord>& records);

// Activation sets indexed by sentence, one per example of `examples`, with
// token counts checked. Throws ValidationError on missing, duplicate or
// mismatched records.
std::vector<ActivationSet> load_paired_activations(const std::filesystem::path& path,
                                                   const Split& examples);

}  // namespace edgeprobe
