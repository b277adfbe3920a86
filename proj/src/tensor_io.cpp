// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "edgeprobe/error.hpp"
#include "edgeprobe/tensor.hpp"

namespace edgeprobe {

Tensor::Tensor(std::string n, std::vector<std::size_t> s) : name(std::move(n)), shape(std::move(s)) {
  std::size_t count = 1;
  for (auto d : shape) count *= d;
  values.assign(count, 0.0);
}

namespace binary {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                         static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
  out.write(bytes, 4);
}

void put_f32(std::ostream& out, float v) { put_u32(out, std::bit_cast<std::uint32_t>(v)); }

bool get_u32(std::istream& in, std::uint32_t& v, const char* what) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  const auto got = in.gcount();
  if (got == 0) return false;
  if (got != 4) throw FormatError(std::string("truncated record reading ") + what);
  v = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
      (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
  return true;
}

void get_f32_array(std::istream& in, std::span<float> out, const char* what) {
  std::vector<unsigned char> raw(out.size() * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
    throw FormatError(std::string("truncated record reading ") + what);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const unsigned char* b = &raw[i * 4];
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    out[i] = std::bit_cast<float>(bits);
  }
}

}  // namespace binary

namespace {
constexpr char kCheckpointMagic[4] = {'E', 'P', 'P', '1'};
}

void write_tensors(const std::vector<const Tensor*>& tensors, std::ostream& out) {
  out.write(kCheckpointMagic, 4);
  for (const Tensor* t : tensors) {
    binary::put_u32(out, static_cast<std::uint32_t>(t->name.size()));
    out.write(t->name.data(), static_cast<std::streamsize>(t->name.size()));
    binary::put_u32(out, static_cast<std::uint32_t>(t->shape.size()));
    for (auto d : t->shape) binary::put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : t->values) binary::put_f32(out, static_cast<float>(v));
  }
}

void write_tensors(const std::vector<const Tensor*>& tensors, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_tensors(tensors, out);
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<Tensor> read_tensors(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw FormatError("bad checkpoint magic (expected EPP1)");
  }
  std::vector<Tensor> out;
  std::uint32_t name_len = 0;
  while (binary::get_u32(in, name_len, "tensor name length")) {
    if (name_len == 0 || name_len > 4096) throw FormatError("bad tensor name length");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    if (in.gcount() != name_len) throw FormatError("truncated tensor name");
    std::uint32_t rank = 0;
    if (!binary::get_u32(in, rank, "tensor rank")) throw FormatError("truncated tensor " + name);
    if (rank > 8) throw FormatError("tensor rank too large for " + name);
    std::vector<std::size_t> shape(rank);
    for (auto& d : shape) {
      std::uint32_t v = 0;
      if (!binary::get_u32(in, v, "tensor dims")) throw FormatError("truncated tensor " + name);
      d = v;
    }
    Tensor t(name, shape);
    std::vector<float> raw(t.size());
    binary::get_f32_array(in, raw, "tensor data");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (!std::isfinite(raw[i])) throw FormatError("non-finite value in tensor " + name);
      t.values[i] = raw[i];
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Tensor> read_tensors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_tensors(in);
}

}  // namespace edgeprobe
