// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/activation_io.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "edgeprobe/error.hpp"

namespace edgeprobe {
namespace {
constexpr char kMagic[4] = {'E', 'P', 'A', '1'};
}

ActivationWriter::ActivationWriter(std::ostream& out, std::uint32_t n_layers, std::uint32_t dim)
    : out_(&out), n_layers_(n_layers), dim_(dim) {
  if (n_layers == 0 || dim == 0) throw FormatError("activation header needs n_layers, dim > 0");
  out.write(kMagic, 4);
  binary::put_u32(out, n_layers);
  binary::put_u32(out, dim);
}

void ActivationWriter::write(std::uint32_t sentence_index, const ActivationSet& acts) {
  if (acts.n_layers() != n_layers_ || acts.dim() != dim_) {
    throw ShapeError("activation record shape does not match file header");
  }
  if (!acts.all_finite()) {
    throw ValidationError("non-finite activation in sentence " + std::to_string(sentence_index));
  }
  binary::put_u32(*out_, sentence_index);
  binary::put_u32(*out_, acts.n_tokens());
  for (float v : acts.values()) binary::put_f32(*out_, v);
}

ActivationReader::ActivationReader(std::istream& in) : in_(&in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("bad activation file magic (expected EPA1)");
  }
  if (!binary::get_u32(in, n_layers_, "header") || !binary::get_u32(in, dim_, "header")) {
    throw FormatError("truncated activation header");
  }
  if (n_layers_ == 0) throw FormatError("activation header: n_layers is 0");
  if (dim_ == 0) throw FormatError("activation header: dim is 0");
}

std::optional<ActivationRecord> ActivationReader::next() {
  ActivationRecord rec;
  if (!binary::get_u32(*in_, rec.sentence_index, "sentence index")) return std::nullopt;
  std::uint32_t n_tokens = 0;
  if (!binary::get_u32(*in_, n_tokens, "token count")) {
    throw FormatError("truncated record for sentence " + std::to_string(rec.sentence_index));
  }
  std::vector<float> values(static_cast<std::size_t>(n_layers_) * n_tokens * dim_);
  binary::get_f32_array(*in_, values, "activation values");
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw FormatError("non-finite activation in sentence " + std::to_string(rec.sentence_index));
    }
  }
  rec.acts = ActivationSet(n_layers_, n_tokens, dim_, std::move(values));
  return rec;
}

std::vector<ActivationRecord> read_activation_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    ActivationReader reader(in);
    std::vector<ActivationRecord> out;
    while (auto rec = reader.next()) out.push_back(std::move(*rec));
    return out;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_activation_file(const std::filesystem::path& path, std::uint32_t n_layers,
                           std::uint32_t dim, const std::vector<ActivationRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  ActivationWriter writer(out, n_layers, dim);
  for (const auto& r : records) writer.write(r.sentence_index, r.acts);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<ActivationSet> load_paired_activations(const std::filesystem::path& path,
                                                   const Split& examples) {
  std::vector<ActivationSet> out(examples.size());
  std::vector<bool> seen(examples.size(), false);
  for (auto& rec : read_activation_file(path)) {
    const auto i = rec.sentence_index;
    if (i >= examples.size()) {
      throw ValidationError(path.string() + ": sentence_index " + std::to_string(i) +
                            " beyond dataset size " + std::to_string(examples.size()));
    }
    if (seen[i]) throw ValidationError(path.string() + ": duplicate sentence_index " + std::to_string(i));
    if (rec.acts.n_tokens() != examples[i].tokens.size()) {
      throw ValidationError(path.string() + ": sentence " + std::to_string(i) + " has " +
                            std::to_string(rec.acts.n_tokens()) + " activation rows for " +
                            std::to_string(examples[i].tokens.size()) + " tokens");
    }
    seen[i] = true;
    out[i] = std::move(rec.acts);
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ValidationError(path.string() + ": no activations for sentence " + std::to_string(i));
  }
  return out;
}

}  // namespace edgeprobe
