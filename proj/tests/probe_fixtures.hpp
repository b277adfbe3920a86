// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Random tiny probes and a central-difference gradient oracle.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "edgeprobe/probe.hpp"
#include "test_support.hpp"

namespace edgeprobe::testing {

struct RandomBatch {
  std::vector<ActivationSet> acts;
  std::vector<TrainingSentence> sentences;
  std::vector<const TrainingSentence*> pointers;
};

inline Span random_span(std::uint32_t n, std::mt19937_64& rng) {
  const auto a = static_cast<std::uint32_t>(rng() % n);
  const auto b = static_cast<std::uint32_t>(rng() % n);
  return Span{std::min(a, b), std::max(a, b) + 1};
}

inline RandomBatch random_batch(const ProbeConfig& config, std::size_t n_sentences, std::uint32_t max_len,
                                std::mt19937_64& rng) {
  RandomBatch batch;
  batch.acts.reserve(n_sentences);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const auto n = static_cast<std::uint32_t>(1 + rng() % max_len);
    batch.acts.push_back(random_acts(static_cast<std::uint32_t>(config.n_layers), n,
                                     static_cast<std::uint32_t>(config.input_dim), rng));
  }
  batch.sentences.resize(n_sentences);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    auto& sent = batch.sentences[s];
    sent.acts = &batch.acts[s];
    const std::uint32_t n = batch.acts[s].n_tokens();
    const std::size_t targets = 1 + rng() % 3;
    for (std::size_t t = 0; t < targets; ++t) {
      LabeledTarget lt;
      lt.span1 = random_span(n, rng);
      if (config.two_span) lt.span2 = random_span(n, rng);
      lt.gold.resize(config.n_labels);
      for (auto& g : lt.gold) g = static_cast<std::uint8_t>(rng() % 2);
      sent.targets.push_back(lt);
    }
  }
  for (const auto& s : batch.sentences) batch.pointers.push_back(&s);
  return batch;
}

// Initialized parameters with every entry (mix included) moved off its
// initial value.
inline ProbeParameters random_parameters(const ProbeConfig& config, std::uint64_t seed) {
  ProbeParameters params = ProbeParameters::initialize(config, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (auto& t : params.tensors()) {
    for (double& v : t.values) v += jitter(rng);
  }
  return params;
}

struct TensorGradientCheck {
  std::string name;
  std::size_t entries = 0;
  double max_relative_error = 0.0;
};

inline double relative_error(double analytic, double numeric) {
  return std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), 1e-6});
}

// Central differences of the mean batch loss, every entry of every tensor.
inline std::vector<TensorGradientCheck> check_gradients(const ProbeConfig& config, const ProbeParameters& params,
                                                        std::span<const TrainingSentence* const> batch,
                                                        double step) {
  Probe probe(config, params);
  ProbeParameters grads = ProbeParameters::zeros(config);
  probe.loss_and_gradients(batch, grads);
  std::vector<TensorGradientCheck> out;
  for (std::size_t ti = 0; ti < params.tensors().size(); ++ti) {
    TensorGradientCheck check;
    check.name = params.tensors()[ti].name;
    auto& values = probe.parameters().tensors()[ti].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = probe.loss(batch);
      values[i] = saved - step;
      const double down = probe.loss(batch);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      check.max_relative_error =
          std::max(check.max_relative_error, relative_error(grads.tensors()[ti].values[i], numeric));
      ++check.entries;
    }
    out.push_back(check);
  }
  return out;
}

}  // namespace edgeprobe::testing
