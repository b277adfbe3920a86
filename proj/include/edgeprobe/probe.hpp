// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Span-pair probing classifier. Per span slot k: a projection (or a
// word-level CNN in its place) to projection_dim, self-attentive pooling
// restricted to the span, then a two-layer tanh MLP over the concatenated
// pooled vectors and an independent sigmoid per label. Gradients are
// derived by hand; every arithmetic step runs in float64.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgeprobe/core_model.hpp"
#include "edgeprobe/encoders.hpp"
#include "edgeprobe/tensor.hpp"

namespace edgeprobe {

enum class InputMode {
  kDirect,  // top layer of the activation set
  kMix,     // learned scalar mix over all layers
  kCnn,     // CNN over layer 0 replaces the projection
};

std::string to_string(InputMode mode);
InputMode input_mode_from_string(std::string_view name);

struct ProbeConfig {
  std::size_t input_dim = 0;
  std::size_t projection_dim = 256;
  std::size_t mlp_hidden_dim = 256;
  std::size_t n_labels = 0;
  bool two_span = false;
  InputMode mode = InputMode::kDirect;
  std::size_t n_layers = 1;   // layers in the activation sets
  std::size_t cnn_width = 1;  // k for kCnn: window of 2k+1 tokens

  std::size_t span_slots() const { return two_span ? 2 : 1; }
  // Throws ShapeError on nonpositive dims or inconsistent mode settings.
  void validate() const;
};

// All trainable tensors, kept in a fixed canonical order:
//   proj{k}.weight/bias or cnn{k}.weight/bias, att{k}.weight for each slot,
//   mlp1.weight/bias, mlp2.weight/bias, out.weight/bias, then
//   mix.gamma/mix.scalars in kMix mode.
class ProbeParameters {
 public:
  ProbeParameters() = default;

  static ProbeParameters zeros(const ProbeConfig& config);
  // Uniform in +-1/sqrt(fan_in); mix gamma = 1 and scalars = 0.
  static ProbeParameters initialize(const ProbeConfig& config, std::uint64_t seed);
  // Checks that names and shapes match `config` exactly.
  static ProbeParameters from_tensors(const ProbeConfig& config, std::vector<Tensor> tensors);

  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  std::vector<const Tensor*> tensor_ptrs() const;

  Tensor& at(std::string_view name);
  const Tensor& at(std::string_view name) const;
  const Tensor* find(std::string_view name) const;

  void fill(double value);
  double squared_norm() const;
  bool all_finite() const;

  friend bool operator==(const ProbeParameters&, const ProbeParameters&) = default;

 private:
  std::vector<Tensor> tensors_;
};

// e_k = A_k e + b_k
void project(std::span<const double> input, const Tensor& weight, const Tensor& bias,
             std::span<double> out);

struct PooledSpan {
  std::vector<double> vector;
  std::vector<double> weights;  // attention weights over the span tokens
};

// Softmax of att . e_i over rows [span.start, span.end) of `projected`,
// then the weighted sum of those rows.
PooledSpan attention_pool(const Matrix& projected, const Span& span,
                          std::span<const double> attention);

// Label probabilities from pooled span vectors (second only for two-span probes).
std::vector<double> predict_from_pooled(const ProbeConfig& config, const ProbeParameters& params,
                                        std::span<const double> pooled1,
                                        std::span<const double> pooled2 = {});

inline constexpr double kProbabilityClamp = 1e-7;

// Mean over labels of the binary cross-entropy, probabilities clamped to
// [1e-7, 1 - 1e-7].
double bce_loss(std::span<const double> probabilities, std::span<const std::uint8_t> gold);

struct LabeledTarget {
  Span span1;
  std::optional<Span> span2;
  std::vector<std::uint8_t> gold;
};

struct TrainingSentence {
  const ActivationSet* acts = nullptr;
  std::vector<LabeledTarget> targets;
};

class Probe {
 public:
  Probe(ProbeConfig config, ProbeParameters params);

  const ProbeConfig& config() const { return config_; }
  const ProbeParameters& parameters() const { return params_; }
  ProbeParameters& parameters() { return params_; }

  std::vector<double> predict(const ActivationSet& acts, const Span& span1,
                              const std::optional<Span>& span2 = std::nullopt) const;
  // One probability vector per target, sharing per-token work.
  std::vector<std::vector<double>> predict_sentence(const ActivationSet& acts,
                                                    const std::vector<LabeledTarget>& targets) const;

  // Mean loss over every target in the batch.
  double loss(std::span<const TrainingSentence* const> batch) const;
  // Same, and overwrites `grads` (layout of parameters()) with its gradient.
  double loss_and_gradients(std::span<const TrainingSentence* const> batch,
                            ProbeParameters& grads) const;

 private:
  double run(std::span<const TrainingSentence* const> batch, ProbeParameters* grads) const;

  ProbeConfig config_;
  ProbeParameters params_;
};

}  // namespace edgeprobe
