// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "edgeprobe/error.hpp"
#include "edgeprobe/kernels/kernels.hpp"

namespace edgeprobe {

ActivationSet::ActivationSet(std::uint32_t n_layers, std::uint32_t n_tokens, std::uint32_t dim)
    : n_layers_(n_layers), n_tokens_(n_tokens), dim_(dim),
      values_(static_cast<std::size_t>(n_layers) * n_tokens * dim, 0.0f) {}

ActivationSet::ActivationSet(std::uint32_t n_layers, std::uint32_t n_tokens, std::uint32_t dim,
                             std::vector<float> values)
    : n_layers_(n_layers), n_tokens_(n_tokens), dim_(dim), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(n_layers) * n_tokens * dim) {
    throw ShapeError("activation values do not match layers x tokens x dim");
  }
}

bool ActivationSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](float v) { return std::isfinite(v); });
}

ActivationSet ActivationSet::layer(std::size_t layer) const {
  if (layer >= n_layers_) throw ShapeError("layer index out of range");
  const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(layer * n_tokens_ * dim_);
  return ActivationSet(1, n_tokens_, dim_,
                       std::vector<float>(begin, begin + static_cast<std::ptrdiff_t>(n_tokens_ * dim_)));
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> vocab, std::size_t dim,
                               std::vector<float> rows)
    : vocab_(std::move(vocab)), dim_(dim), rows_(std::move(rows)) {
  if (dim_ == 0) throw ShapeError("embedding dim must be positive");
  if (rows_.size() == vocab_.size() * dim_) rows_.resize(rows_.size() + dim_, 0.0f);
  if (rows_.size() != (vocab_.size() + 1) * dim_) {
    throw ShapeError("embedding rows do not match vocabulary size");
  }
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], i).second) {
      throw ValidationError("duplicate embedding entry '" + vocab_[i] + "'");
    }
  }
}

EmbeddingTable EmbeddingTable::load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file " + path.string());
  std::vector<std::string> vocab;
  std::vector<float> rows;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<float> row;
    float v = 0.0f;
    while (fields >> v) row.push_back(v);
    if (!fields.eof()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": bad number");
    }
    if (dim == 0) dim = row.size();
    if (row.empty() || row.size() != dim) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " values");
    }
    vocab.push_back(std::move(token));
    rows.insert(rows.end(), row.begin(), row.end());
  }
  if (dim == 0) throw FormatError(path.string() + ": no embeddings");
  return EmbeddingTable(std::move(vocab), dim, std::move(rows));
}

EmbeddingTable EmbeddingTable::random(std::vector<std::string> vocab, std::size_t dim,
                                      std::uint64_t seed) {
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<float> rows(vocab.size() * dim);
  for (float& v : rows) v = static_cast<float>(normal(rng));
  return EmbeddingTable(std::move(vocab), dim, std::move(rows));
}

std::size_t EmbeddingTable::row_index(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? oov_row() : it->second;
}

ActivationSet lexical_encode(const std::vector<std::string>& tokens, const EmbeddingTable& table) {
  ActivationSet out(1, static_cast<std::uint32_t>(tokens.size()),
                    static_cast<std::uint32_t>(table.dim()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto src = table.row(table.row_index(tokens[i]));
    std::copy(src.begin(), src.end(), out.vec(0, i).begin());
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<double> MixParameters::weights() const { return softmax(scalars); }

Matrix scalar_mix(const ActivationSet& acts, const MixParameters& mix) {
  if (mix.scalars.size() != acts.n_layers()) {
    throw ShapeError("scalar_mix: " + std::to_string(mix.scalars.size()) + " scalars for " +
                     std::to_string(acts.n_layers()) + " layers");
  }
  const std::vector<double> w = mix.weights();
  Matrix out(acts.n_tokens(), acts.dim());
  for (std::size_t i = 0; i < acts.n_tokens(); ++i) {
    auto row = out.row(i);
    for (std::size_t l = 0; l < acts.n_layers(); ++l) {
      auto h = acts.vec(l, i);
      for (std::size_t d = 0; d < row.size(); ++d) row[d] += w[l] * h[d];
    }
    for (double& v : row) v *= mix.gamma;
  }
  return out;
}

ActivationSet concat_encode(const ActivationSet& acts) {
  if (acts.n_layers() < 2) throw ShapeError("concat_encode needs at least 2 layers");
  const std::uint32_t dim = acts.dim();
  const std::size_t top = acts.n_layers() - 1;
  ActivationSet out(1, acts.n_tokens(), 2 * dim);
  for (std::size_t i = 0; i < acts.n_tokens(); ++i) {
    auto dst = out.vec(0, i);
    auto lex = acts.vec(0, i);
    auto ctx = acts.vec(top, i);
    std::copy(lex.begin(), lex.end(), dst.begin());
    std::copy(ctx.begin(), ctx.end(), dst.begin() + dim);
  }
  return out;
}

void cnn_window(const ActivationSet& acts, std::size_t layer, std::size_t token, std::size_t width,
                std::span<double> window) {
  const std::size_t dim = acts.dim();
  const auto n = static_cast<std::ptrdiff_t>(acts.n_tokens());
  std::fill(window.begin(), window.end(), 0.0);
  for (std::size_t slot = 0; slot < 2 * width + 1; ++slot) {
    const auto pos = static_cast<std::ptrdiff_t>(token + slot) - static_cast<std::ptrdiff_t>(width);
    if (pos < 0 || pos >= n) continue;
    auto src = acts.vec(layer, static_cast<std::size_t>(pos));
    std::copy(src.begin(), src.end(), window.begin() + static_cast<std::ptrdiff_t>(slot * dim));
  }
}

namespace {

void check_cnn(const ActivationSet& acts, const CnnParameters& params) {
  if (params.width != 1 && params.width != 2) throw ShapeError("CNN width must be 1 or 2");
  if (params.weight.cols != (2 * params.width + 1) * acts.dim() ||
      params.bias.size() != params.weight.rows) {
    throw ShapeError("CNN parameters do not match input dim");
  }
}

}  // namespace

void cnn_output_at(const ActivationSet& acts, std::size_t layer, std::size_t token,
                   const CnnParameters& params, std::span<double> out) {
  std::vector<double> window(params.weight.cols);
  cnn_window(acts, layer, token, params.width, window);
  kernels::matvec(params.weight.data, params.bias, window, out);
  for (double& v : out) v = std::tanh(v);
}

Matrix cnn_encode(const ActivationSet& acts, const CnnParameters& params) {
  check_cnn(acts, params);
  Matrix out(acts.n_tokens(), params.out_dim());
  for (std::size_t i = 0; i < acts.n_tokens(); ++i) cnn_output_at(acts, 0, i, params, out.row(i));
  return out;
}

namespace {

// Modified Gram-Schmidt on the rows of `m` (rows <= cols), two passes.
void orthonormalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    auto row = m.row(r);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t q = 0; q < r; ++q) {
        auto prev = m.row(q);
        double proj = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) proj += row[c] * prev[c];
        for (std::size_t c = 0; c < m.cols; ++c) row[c] -= proj * prev[c];
      }
    }
    double norm = 0.0;
    for (double v : row) norm += v * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw Error("degenerate random matrix during orthonormalization");
    for (double& v : row) v /= norm;
  }
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) t(c, r) = m(r, c);
  }
  return t;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Matrix random_orthonormal(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool wide = rows <= cols;
  Matrix m(wide ? rows : cols, wide ? cols : rows);
  for (double& v : m.data) v = normal(rng);
  orthonormalize_rows(m);
  return wide ? m : transpose(m);
}

OrthonormalRecurrentEncoder::OrthonormalRecurrentEncoder(std::size_t input_dim,
                                                         OrthonormalEncoderConfig config)
    : input_dim_(input_dim), config_(config) {
  if (config_.state_dim == 0) throw ShapeError("state_dim must be positive");
  if (input_dim_ == 0) throw ShapeError("input dim must be positive");
  std::mt19937_64 rng(config_.seed);
  const std::size_t width = 2 * config_.state_dim;
  input_projection_ = random_orthonormal(width, input_dim_, rng);
  layers_.resize(config_.layers);
  for (auto& layer : layers_) {
    for (auto& dir : layer) {
      for (int g = 0; g < 4; ++g) {
        dir.input_weight[g] = random_orthonormal(config_.state_dim, width, rng);
        dir.recurrent_weight[g] = random_orthonormal(config_.state_dim, config_.state_dim, rng);
      }
    }
  }
}

std::vector<const Matrix*> OrthonormalRecurrentEncoder::matrices() const {
  std::vector<const Matrix*> out{&input_projection_};
  for (const auto& layer : layers_) {
    for (const auto& dir : layer) {
      for (int g = 0; g < 4; ++g) {
        out.push_back(&dir.input_weight[g]);
        out.push_back(&dir.recurrent_weight[g]);
      }
    }
  }
  return out;
}

Matrix OrthonormalRecurrentEncoder::run_direction(const Direction& dir, const Matrix& inputs,
                                                  bool reverse) const {
  const std::size_t state = config_.state_dim;
  const std::size_t n = inputs.rows;
  Matrix hidden(n, state);
  std::vector<double> h(state, 0.0), c(state, 0.0), gate_pre(state), recur(state);
  std::vector<double> gates[4];
  for (auto& g : gates) g.resize(state);
  const std::vector<double> zero_bias(state, 0.0);
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    for (int g = 0; g < 4; ++g) {
      kernels::matvec(dir.input_weight[g].data, zero_bias, inputs.row(t), gate_pre);
      kernels::matvec(dir.recurrent_weight[g].data, zero_bias, h, recur);
      for (std::size_t d = 0; d < state; ++d) {
        const double pre = gate_pre[d] + recur[d];
        gates[g][d] = g == 3 ? std::tanh(pre) : sigmoid(pre);
      }
    }
    for (std::size_t d = 0; d < state; ++d) {
      c[d] = gates[1][d] * c[d] + gates[0][d] * gates[3][d];
      h[d] = gates[2][d] * std::tanh(c[d]);
    }
    std::copy(h.begin(), h.end(), hidden.row(t).begin());
  }
  return hidden;
}

ActivationSet OrthonormalRecurrentEncoder::encode(const ActivationSet& input) const {
  if (input.dim() != input_dim_) throw ShapeError("orthonormal encoder: input dim mismatch");
  const std::size_t n = input.n_tokens();
  const std::size_t width = output_dim();
  const std::size_t state = config_.state_dim;
  ActivationSet out(static_cast<std::uint32_t>(1 + layers_.size()), static_cast<std::uint32_t>(n),
                    static_cast<std::uint32_t>(width));

  Matrix current(n, width);
  const std::vector<double> zero_bias(width, 0.0);
  std::vector<double> x(input_dim_);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = input.vec(0, i);
    std::copy(src.begin(), src.end(), x.begin());
    kernels::matvec(input_projection_.data, zero_bias, x, current.row(i));
  }
  auto store = [&](std::size_t layer, const Matrix& m) {
    for (std::size_t i = 0; i < n; ++i) {
      auto dst = out.vec(layer, i);
      for (std::size_t d = 0; d < width; ++d) dst[d] = static_cast<float>(m(i, d));
    }
  };
  store(0, current);
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Matrix fwd = run_direction(layers_[l][0], current, false);
    const Matrix bwd = run_direction(layers_[l][1], current, true);
    Matrix next(n, width);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(fwd.row(i).begin(), fwd.row(i).end(), next.row(i).begin());
      std::copy(bwd.row(i).begin(), bwd.row(i).end(), next.row(i).begin() + static_cast<std::ptrdiff_t>(state));
    }
    store(l + 1, next);
    current = std::move(next);
  }
  return out;
}

}  // namespace edgeprobe
