// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edgeprobe/encoders.hpp"
#include "edgeprobe/error.hpp"
#include "test_support.hpp"

namespace edgeprobe {
namespace {

using testing::random_acts;

double max_abs_gram_error(const Matrix& q) {
  // Gram matrix along the smaller dimension.
  const bool wide = q.rows <= q.cols;
  const std::size_t n = wide ? q.rows : q.cols;
  const std::size_t m = wide ? q.cols : q.rows;
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += wide ? q(a, k) * q(b, k) : q(k, a) * q(k, b);
      worst = std::max(worst, std::fabs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

TEST(Embeddings, OovRowIsZeroAndLexicalIsContextFree) {
  const auto table = EmbeddingTable::random({"b", "a", "c", "a"}, 4, 3);
  EXPECT_EQ(table.vocab_size(), 3u);
  for (float v : table.row(table.oov_row())) EXPECT_EQ(v, 0.0f);
  const auto x = lexical_encode({"a", "zzz", "c"}, table);
  const auto y = lexical_encode({"c", "a"}, table);
  EXPECT_EQ(x.n_layers(), 1u);
  for (std::size_t d = 0; d < 4; ++d) {
    EXPECT_EQ(x.vec(0, 0)[d], y.vec(0, 1)[d]);
    EXPECT_EQ(x.vec(0, 2)[d], y.vec(0, 0)[d]);
    EXPECT_EQ(x.vec(0, 1)[d], 0.0f);
  }
}

TEST(Embeddings, LoadText) {
  testing::TempDir dir("emb");
  testing::write_file(dir / "e.txt", "the 1 2\ncat 3 4.5\n");
  const auto table = EmbeddingTable::load_text(dir / "e.txt");
  EXPECT_EQ(table.dim(), 2u);
  EXPECT_EQ(table.row(table.row_index("cat"))[1], 4.5f);
  testing::write_file(dir / "bad.txt", "the 1 2\ncat 3\n");
  EXPECT_THROW(EmbeddingTable::load_text(dir / "bad.txt"), FormatError);
}

TEST(ScalarMix, OneHotWeightsSelectLayer) {
  std::mt19937_64 rng(1);
  const auto acts = random_acts(3, 4, 5, rng);
  MixParameters mix{2.0, {-1000.0, 1000.0, -1000.0}};
  const Matrix out = scalar_mix(acts, mix);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t d = 0; d < 5; ++d) EXPECT_NEAR(out(i, d), 2.0 * acts.vec(1, i)[d], 1e-9);
  }
}

TEST(ScalarMix, ConvexHullProperty) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto acts = random_acts(4, 3, 6, rng);
    MixParameters mix{1.0, {normal(rng), normal(rng), normal(rng), normal(rng)}};
    const auto w = mix.weights();
    double total = 0.0;
    for (double v : w) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const Matrix out = scalar_mix(acts, mix);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t d = 0; d < 6; ++d) {
        double lo = 1e30, hi = -1e30;
        for (std::size_t l = 0; l < 4; ++l) {
          lo = std::min<double>(lo, acts.vec(l, i)[d]);
          hi = std::max<double>(hi, acts.vec(l, i)[d]);
        }
        EXPECT_GE(out(i, d), lo - 1e-9);
        EXPECT_LE(out(i, d), hi + 1e-9);
      }
    }
  }
}

TEST(ScalarMix, LayerCountMismatchThrows) {
  std::mt19937_64 rng(3);
  EXPECT_THROW(scalar_mix(random_acts(2, 2, 2, rng), MixParameters{1.0, {0.0}}), ShapeError);
}

TEST(Concat, LayerZeroThenTop) {
  std::mt19937_64 rng(4);
  const auto acts = random_acts(3, 2, 3, rng);
  const auto cat = concat_encode(acts);
  EXPECT_EQ(cat.n_layers(), 1u);
  EXPECT_EQ(cat.dim(), 6u);
  for (std::size_t d = 0; d < 3; ++d) {
    EXPECT_EQ(cat.vec(0, 1)[d], acts.vec(0, 1)[d]);
    EXPECT_EQ(cat.vec(0, 1)[3 + d], acts.vec(2, 1)[d]);
  }
  EXPECT_THROW(concat_encode(random_acts(1, 2, 3, rng)), ShapeError);
}

CnnParameters random_cnn(std::size_t width, std::size_t in_dim, std::size_t out_dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  CnnParameters p;
  p.width = width;
  p.weight = Matrix(out_dim, (2 * width + 1) * in_dim);
  for (double& v : p.weight.data) v = normal(rng);
  p.bias.resize(out_dim);
  for (double& v : p.bias) v = normal(rng);
  return p;
}

TEST(Cnn, ReceptiveFieldIsExactlyPlusMinusK) {
  std::mt19937_64 rng(5);
  for (std::size_t k : {1u, 2u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::uint32_t n = 1 + rng() % 9;
      auto acts = random_acts(1, n, 4, rng);
      const auto params = random_cnn(k, 4, 3, rng);
      const Matrix before = cnn_encode(acts, params);
      const std::size_t j = rng() % n;
      for (auto& v : acts.vec(0, j)) v += 1.0f;
      const Matrix after = cnn_encode(acts, params);
      for (std::size_t i = 0; i < n; ++i) {
        bool changed = false;
        for (std::size_t d = 0; d < 3; ++d) changed |= before(i, d) != after(i, d);
        const std::size_t dist = i > j ? i - j : j - i;
        EXPECT_EQ(changed, dist <= k) << "k=" << k << " i=" << i << " j=" << j;
      }
    }
  }
}

TEST(Cnn, ZeroPaddingAtEdges) {
  std::mt19937_64 rng(6);
  const auto acts = random_acts(1, 1, 2, rng);
  std::vector<double> window(5 * 2);
  cnn_window(acts, 0, 0, 2, window);
  for (std::size_t s = 0; s < 5; ++s) {
    for (std::size_t d = 0; d < 2; ++d) {
      EXPECT_EQ(window[s * 2 + d], s == 2 ? static_cast<double>(acts.vec(0, 0)[d]) : 0.0);
    }
  }
}

TEST(Cnn, BadWidthThrows) {
  std::mt19937_64 rng(7);
  EXPECT_THROW(cnn_encode(random_acts(1, 2, 2, rng), random_cnn(3, 2, 2, rng)), ShapeError);
}

TEST(Orthonormal, SquareAndRectangular) {
  std::mt19937_64 rng(8);
  for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{{1, 1}, {8, 8}, {64, 64}, {5, 9}, {9, 5}, {64, 128}}) {
    const Matrix q = random_orthonormal(r, c, rng);
    EXPECT_EQ(q.rows, r);
    EXPECT_EQ(q.cols, c);
    EXPECT_LT(max_abs_gram_error(q), 1e-10) << r << "x" << c;
  }
}

TEST(Orthonormal, EncoderMatricesAndShape) {
  OrthonormalEncoderConfig config{42, 2, 8};
  const OrthonormalRecurrentEncoder enc(5, config);
  for (const Matrix* m : enc.matrices()) EXPECT_LT(max_abs_gram_error(*m), 1e-5);
  std::mt19937_64 rng(9);
  const auto out = enc.encode(random_acts(1, 6, 5, rng));
  EXPECT_EQ(out.n_layers(), 3u);
  EXPECT_EQ(out.dim(), 16u);
  EXPECT_EQ(out.n_tokens(), 6u);
  EXPECT_TRUE(out.all_finite());
}

TEST(Orthonormal, SeedDeterminism) {
  std::mt19937_64 rng(10);
  const auto input = random_acts(1, 5, 4, rng);
  const OrthonormalRecurrentEncoder a(4, {7, 2, 6});
  const OrthonormalRecurrentEncoder b(4, {7, 2, 6});
  const OrthonormalRecurrentEncoder c(4, {8, 2, 6});
  EXPECT_EQ(a.encode(input), b.encode(input));
  EXPECT_NE(a.encode(input), c.encode(input));
}

TEST(Orthonormal, DirectionsArePrefixAndSuffixFunctions) {
  const std::size_t state = 6, n = 7;
  const OrthonormalRecurrentEncoder enc(4, {3, 1, state});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix inputs(n, 2 * state);
  for (double& v : inputs.data) v = normal(rng);
  const auto& dirs = enc.layers()[0];
  const Matrix fwd = enc.run_direction(dirs[0], inputs, false);
  const Matrix bwd = enc.run_direction(dirs[1], inputs, true);
  const std::size_t j = 3;
  Matrix perturbed = inputs;
  for (double& v : perturbed.row(j)) v += 1.0;
  const Matrix fwd2 = enc.run_direction(dirs[0], perturbed, false);
  const Matrix bwd2 = enc.run_direction(dirs[1], perturbed, true);
  for (std::size_t i = 0; i < n; ++i) {
    bool f_changed = false, b_changed = false;
    for (std::size_t d = 0; d < state; ++d) {
      f_changed |= fwd(i, d) != fwd2(i, d);
      b_changed |= bwd(i, d) != bwd2(i, d);
    }
    EXPECT_EQ(f_changed, i >= j) << i;
    EXPECT_EQ(b_changed, i <= j) << i;
  }
}

}  // namespace
}  // namespace edgeprobe
