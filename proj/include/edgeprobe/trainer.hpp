// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

// Adam training loop with global-norm clipping, periodic validation,
// learning-rate halving on plateaus and early stopping.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "edgeprobe/probe.hpp"

namespace edgeprobe {

struct TrainOptions {
  double learning_rate = 1e-4;
  std::size_t batch_size = 32;  // sentences
  double clip_norm = 5.0;
  std::size_t eval_interval = 1000;
  std::size_t lr_patience = 5;     // validations without improvement before halving
  std::size_t stop_patience = 20;  // validations without improvement before stopping
  std::size_t max_steps = 100000;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double threshold = 0.5;
  std::uint64_t seed = 0;
};

struct TrainState {
  std::size_t step = 0;
  ProbeParameters first_moment;
  ProbeParameters second_moment;
  double learning_rate = 0.0;
  double best_dev_f1 = -1.0;
  std::size_t validations_since_improvement = 0;
};

struct TrainLogEntry {
  std::size_t step = 0;
  double loss = 0.0;  // mean batch loss since the previous validation
  double dev_f1 = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  ProbeParameters best;
  double best_dev_f1 = 0.0;
  std::size_t best_step = 0;
  std::size_t steps = 0;
  bool early_stopped = false;
  std::vector<TrainLogEntry> log;
};

// Scales `grads` so its global L2 norm is at most `max_norm`; returns the
// norm before clipping.
double clip_by_global_norm(ProbeParameters& grads, double max_norm);

void adam_update(ProbeParameters& params, const ProbeParameters& grads, TrainState& state,
                 const TrainOptions& options);

// Micro-F1 of `probe` on `sentences` at `threshold`.
double evaluate_micro_f1(const Probe& probe, std::span<const TrainingSentence> sentences,
                         double threshold = 0.5);

// Throws Error on an empty train split or empty dev split. Deterministic
// given options.seed.
TrainResult train_probe(const ProbeConfig& config, std::span<const TrainingSentence> train,
                        std::span<const TrainingSentence> dev, const TrainOptions& options);

// {"step":..,"loss":..,"dev_f1":..,"lr":..} per line.
void write_train_log(const std::vector<TrainLogEntry>& log, std::ostream& out);

}  // namespace edgeprobe
