// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "edgeprobe/activation_io.hpp"
#include "edgeprobe/error.hpp"
#include "edgeprobe/tensor.hpp"
#include "test_support.hpp"

namespace edgeprobe {
namespace {

using testing::random_acts;

void le32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void lef32(std::string& s, float f) {
  std::uint32_t v;
  std::memcpy(&v, &f, 4);
  le32(s, v);
}

TEST(ActivationFile, ByteLayout) {
  ActivationSet acts(2, 1, 2, {1.0f, 2.0f, 3.0f, 4.0f});
  std::ostringstream out;
  ActivationWriter writer(out, 2, 2);
  writer.write(7, acts);
  std::string expected = "EPA1";
  le32(expected, 2);
  le32(expected, 2);
  le32(expected, 7);
  le32(expected, 1);
  for (float f : {1.0f, 2.0f, 3.0f, 4.0f}) lef32(expected, f);
  EXPECT_EQ(out.str(), expected);
}

TEST(ActivationFile, RoundTrip) {
  std::mt19937_64 rng(1);
  std::stringstream buf;
  std::vector<ActivationSet> sets;
  {
    ActivationWriter writer(buf, 3, 5);
    for (std::uint32_t i = 0; i < 10; ++i) {
      sets.push_back(random_acts(3, 1 + i % 4, 5, rng));
      writer.write(i, sets.back());
    }
  }
  ActivationReader reader(buf);
  EXPECT_EQ(reader.n_layers(), 3u);
  EXPECT_EQ(reader.dim(), 5u);
  for (std::uint32_t i = 0; i < 10; ++i) {
    auto rec = reader.next();
    ASSERT_TRUE(rec.has_value());
    EXPECT_EQ(rec->sentence_index, i);
    EXPECT_EQ(rec->acts, sets[i]);
  }
  EXPECT_FALSE(reader.next().has_value());
}

TEST(ActivationFile, HeaderOnlyIsEmpty) {
  testing::TempDir dir("acts");
  write_activation_file(dir / "a.epa", 2, 4, {});
  EXPECT_TRUE(read_activation_file(dir / "a.epa").empty());
}

TEST(ActivationFile, Rejections) {
  std::istringstream bad_magic(std::string("EPA2") + std::string(8, '\1'));
  EXPECT_THROW(ActivationReader{bad_magic}, FormatError);

  std::string zero_dim = "EPA1";
  le32(zero_dim, 1);
  le32(zero_dim, 0);
  std::istringstream z(zero_dim);
  EXPECT_THROW(ActivationReader{z}, FormatError);

  std::string truncated = "EPA1";
  le32(truncated, 1);
  le32(truncated, 2);
  le32(truncated, 0);
  le32(truncated, 1);
  lef32(truncated, 1.0f);
  std::istringstream t(truncated);
  ActivationReader tr(t);
  EXPECT_THROW(tr.next(), FormatError);

  std::string nan = "EPA1";
  le32(nan, 1);
  le32(nan, 1);
  le32(nan, 0);
  le32(nan, 1);
  lef32(nan, std::numeric_limits<float>::quiet_NaN());
  std::istringstream n(nan);
  ActivationReader nr(n);
  EXPECT_THROW(nr.next(), FormatError);
}

TEST(ActivationFile, WriterRejectsShapeAndNan) {
  std::ostringstream out;
  ActivationWriter writer(out, 1, 2);
  EXPECT_THROW(writer.write(0, ActivationSet(1, 1, 3)), ShapeError);
  ActivationSet bad(1, 1, 2, {1.0f, std::numeric_limits<float>::infinity()});
  EXPECT_THROW(writer.write(0, bad), ValidationError);
}

Split tokens_split(std::vector<std::size_t> lengths) {
  Split s;
  for (auto n : lengths) {
    EdgeExample ex;
    for (std::size_t i = 0; i < n; ++i) ex.tokens.push_back("t" + std::to_string(i));
    ex.text = join_tokens(ex.tokens);
    s.push_back(ex);
  }
  return s;
}

TEST(PairedActivations, ChecksIndexAndTokenCounts) {
  testing::TempDir dir("paired");
  std::mt19937_64 rng(2);
  const Split split = tokens_split({2, 3});
  // written out of order; pairing is by sentence_index
  write_activation_file(dir / "ok.epa", 1, 2, {{1, random_acts(1, 3, 2, rng)}, {0, random_acts(1, 2, 2, rng)}});
  const auto sets = load_paired_activations(dir / "ok.epa", split);
  EXPECT_EQ(sets[0].n_tokens(), 2u);
  EXPECT_EQ(sets[1].n_tokens(), 3u);

  write_activation_file(dir / "missing.epa", 1, 2, {{0, random_acts(1, 2, 2, rng)}});
  EXPECT_THROW(load_paired_activations(dir / "missing.epa", split), ValidationError);
  write_activation_file(dir / "count.epa", 1, 2, {{0, random_acts(1, 2, 2, rng)}, {1, random_acts(1, 2, 2, rng)}});
  EXPECT_THROW(load_paired_activations(dir / "count.epa", split), ValidationError);
  write_activation_file(dir / "dup.epa", 1, 2,
                        {{0, random_acts(1, 2, 2, rng)}, {0, random_acts(1, 2, 2, rng)}, {1, random_acts(1, 3, 2, rng)}});
  EXPECT_THROW(load_paired_activations(dir / "dup.epa", split), ValidationError);
  write_activation_file(dir / "range.epa", 1, 2, {{5, random_acts(1, 2, 2, rng)}});
  EXPECT_THROW(load_paired_activations(dir / "range.epa", split), ValidationError);
}

TEST(Checkpoint, RoundTripAndLayout) {
  Tensor a("w", {2, 3});
  for (std::size_t i = 0; i < 6; ++i) a.values[i] = 0.5 * static_cast<double>(i);
  Tensor b("b", {3});
  b.values = {-1.0, 0.25, 8.0};
  std::stringstream buf;
  write_tensors({&a, &b}, buf);
  std::string expected = "EPP1";
  le32(expected, 1);
  expected += "w";
  le32(expected, 2);
  le32(expected, 2);
  le32(expected, 3);
  for (std::size_t i = 0; i < 6; ++i) lef32(expected, static_cast<float>(a.values[i]));
  EXPECT_EQ(buf.str().substr(0, expected.size()), expected);
  const auto back = read_tensors(buf);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].name, "w");
  EXPECT_EQ(back[0].shape, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(back[0].values, a.values);
  EXPECT_EQ(back[1].values, b.values);
}

TEST(Checkpoint, Rejections) {
  std::istringstream bad("EPPX");
  EXPECT_THROW(read_tensors(bad), FormatError);
  std::string trunc = "EPP1";
  le32(trunc, 1);
  trunc += "w";
  le32(trunc, 1);
  le32(trunc, 4);
  lef32(trunc, 1.0f);
  std::istringstream t(trunc);
  EXPECT_THROW(read_tensors(t), FormatError);
  std::string nan = "EPP1";
  le32(nan, 1);
  nan += "w";
  le32(nan, 1);
  le32(nan, 1);
  lef32(nan, std::numeric_limits<float>::quiet_NaN());
  std::istringstream n(nan);
  EXPECT_THROW(read_tensors(n), FormatError);
}

}  // namespace
}  // namespace edgeprobe
