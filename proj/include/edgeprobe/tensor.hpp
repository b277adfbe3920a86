// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace edgeprobe {

// Row-major dense matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Named n-d array; the unit of checkpointing.
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  Tensor(std::string n, std::vector<std::size_t> s);

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  std::span<double> span() { return values; }
  std::span<const double> span() const { return values; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// "EPP1" checkpoint: magic, then until EOF per tensor: u32 name length,
// UTF-8 name, u32 rank, rank x u32 dims, float32 data. Little-endian.
void write_tensors(const std::vector<const Tensor*>& tensors, std::ostream& out);
void write_tensors(const std::vector<const Tensor*>& tensors, const std::filesystem::path& path);
std::vector<Tensor> read_tensors(std::istream& in);
std::vector<Tensor> read_tensors(const std::filesystem::path& path);

namespace binary {

void put_u32(std::ostream& out, std::uint32_t v);
void put_f32(std::ostream& out, float v);
// false on clean EOF before the first byte; throws FormatError on partial reads.
bool get_u32(std::istream& in, std::uint32_t& v, const char* what);
void get_f32_array(std::istream& in, std::span<float> out, const char* what);

}  // namespace binary

}  // namespace edgeprobe
