// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Per-token representations: multi-layer activation sets and the baseline
// encoders built on top of them (lexical lookup, word-level CNN, fixed
// random orthonormal biLSTM, scalar mixing, concatenation).

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "edgeprobe/tensor.hpp"

namespace edgeprobe {

// Dense float32 [layer][token][dim] activations for one sentence. Layer 0
// is the context-independent layer.
class ActivationSet {
 public:
  ActivationSet() = default;
  ActivationSet(std::uint32_t n_layers, std::uint32_t n_tokens, std::uint32_t dim);
  ActivationSet(std::uint32_t n_layers, std::uint32_t n_tokens, std::uint32_t dim,
                std::vector<float> values);

  std::uint32_t n_layers() const { return n_layers_; }
  std::uint32_t n_tokens() const { return n_tokens_; }
  std::uint32_t dim() const { return dim_; }

  std::span<const float> vec(std::size_t layer, std::size_t token) const {
    return {values_.data() + (layer * n_tokens_ + token) * dim_, dim_};
  }
  std::span<float> vec(std::size_t layer, std::size_t token) {
    return {values_.data() + (layer * n_tokens_ + token) * dim_, dim_};
  }
  const std::vector<float>& values() const { return values_; }
  std::vector<float>& values() { return values_; }

  bool all_finite() const;
  // A single-layer copy of `layer`.
  ActivationSet layer(std::size_t layer) const;

  friend bool operator==(const ActivationSet&, const ActivationSet&) = default;

 private:
  std::uint32_t n_layers_ = 0;
  std::uint32_t n_tokens_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<float> values_;
};

// token -> row lookup with one shared out-of-vocabulary row (all zeros).
class EmbeddingTable {
 public:
  EmbeddingTable(std::vector<std::string> vocab, std::size_t dim, std::vector<float> rows);

  // "token v1 ... vd" per line (word2vec/GloVe text layout).
  static EmbeddingTable load_text(const std::filesystem::path& path);
  // Standard-normal rows for each distinct entry of `vocab`, seeded.
  static EmbeddingTable random(std::vector<std::string> vocab, std::size_t dim, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  std::size_t vocab_size() const { return vocab_.size(); }
  std::size_t oov_row() const { return vocab_.size(); }
  std::size_t row_index(const std::string& token) const;
  std::span<const float> row(std::size_t index) const { return {rows_.data() + index * dim_, dim_}; }

 private:
  std::vector<std::string> vocab_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::size_t dim_ = 0;
  std::vector<float> rows_;  // (vocab + 1) x dim, OOV last
};

ActivationSet lexical_encode(const std::vector<std::string>& tokens, const EmbeddingTable& table);

// Gamma plus one raw scalar per layer; the weights applied are softmax(scalars).
struct MixParameters {
  double gamma = 1.0;
  std::vector<double> scalars;

  std::vector<double> weights() const;
};

std::vector<double> softmax(std::span<const double> logits);

// e_i = gamma * sum_l softmax(s)_l * h_{l,i}. Throws ShapeError on layer-count mismatch.
Matrix scalar_mix(const ActivationSet& acts, const MixParameters& mix);

// [layer 0 ; top layer] per token. Throws ShapeError for fewer than 2 layers.
ActivationSet concat_encode(const ActivationSet& acts);

// Word-level CNN over a window of +-width tokens: out_i = tanh(W [x_{i-k}; ...; x_{i+k}] + b)
// with zero vectors for positions outside the sentence.
struct CnnParameters {
  std::size_t width = 1;  // k, 1 or 2
  Matrix weight;          // out_dim x (2k+1) * in_dim
  std::vector<double> bias;

  std::size_t in_dim() const { return weight.cols / (2 * width + 1); }
  std::size_t out_dim() const { return weight.rows; }
};

// Concatenated window around `token` from `layer`, zero-padded.
void cnn_window(const ActivationSet& acts, std::size_t layer, std::size_t token, std::size_t width,
                std::span<double> window);
// Writes tanh(W window + b) for one position.
void cnn_output_at(const ActivationSet& acts, std::size_t layer, std::size_t token,
                   const CnnParameters& params, std::span<double> out);
// Uses layer 0. Throws ShapeError for width outside {1,2} or a dim mismatch.
Matrix cnn_encode(const ActivationSet& acts, const CnnParameters& params);

// rows x cols matrix with orthonormal rows (rows <= cols) or orthonormal
// columns (rows > cols), from a Gaussian draw.
Matrix random_orthonormal(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

struct OrthonormalEncoderConfig {
  std::uint64_t seed = 0;
  std::size_t layers = 2;
  std::size_t state_dim = 64;
};

// Fixed random biLSTM stack. Output layer 0 is the input's layer 0 passed
// through a random orthonormal projection to 2*state_dim; layer l >= 1 is
// [forward ; backward] hidden states of recurrent layer l. Never trained.
class OrthonormalRecurrentEncoder {
 public:
  struct Direction {
    // Per gate (input, forget, output, candidate): input and recurrent weights.
    Matrix input_weight[4];
    Matrix recurrent_weight[4];
  };

  OrthonormalRecurrentEncoder(std::size_t input_dim, OrthonormalEncoderConfig config);

  ActivationSet encode(const ActivationSet& input) const;

  std::size_t output_dim() const { return 2 * config_.state_dim; }
  std::size_t input_dim() const { return input_dim_; }
  const Matrix& input_projection() const { return input_projection_; }
  // [layer][0 = forward, 1 = backward]
  const std::vector<std::array<Direction, 2>>& layers() const { return layers_; }
  std::vector<const Matrix*> matrices() const;

  // Hidden states of one direction over a sequence of input vectors (rows).
  Matrix run_direction(const Direction& dir, const Matrix& inputs, bool reverse) const;

 private:
  std::size_t input_dim_;
  OrthonormalEncoderConfig config_;
  Matrix input_projection_;
  std::vector<std::array<Direction, 2>> layers_;
};

}  // namespace edgeprobe
