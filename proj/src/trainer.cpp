// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "edgeprobe/error.hpp"
#include "edgeprobe/evaluation.hpp"
#include "json.hpp"

namespace edgeprobe {

double clip_by_global_norm(ProbeParameters& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for (auto& t : grads.tensors()) {
      for (double& v : t.values) v *= scale;
    }
  }
  return norm;
}

void adam_update(ProbeParameters& params, const ProbeParameters& grads, TrainState& state,
                 const TrainOptions& options) {
  ++state.step;
  const double correction1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
  auto& p = params.tensors();
  const auto& g = grads.tensors();
  auto& m = state.first_moment.tensors();
  auto& v = state.second_moment.tensors();
  for (std::size_t t = 0; t < p.size(); ++t) {
    for (std::size_t i = 0; i < p[t].values.size(); ++i) {
      const double gi = g[t].values[i];
      m[t].values[i] = options.beta1 * m[t].values[i] + (1.0 - options.beta1) * gi;
      v[t].values[i] = options.beta2 * v[t].values[i] + (1.0 - options.beta2) * gi * gi;
      const double m_hat = m[t].values[i] / correction1;
      const double v_hat = v[t].values[i] / correction2;
      p[t].values[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  }
}

double evaluate_micro_f1(const Probe& probe, std::span<const TrainingSentence> sentences,
                         double threshold) {
  std::vector<std::vector<double>> predictions;
  std::vector<std::vector<std::uint8_t>> golds;
  for (const auto& s : sentences) {
    if (s.targets.empty()) continue;
    auto probs = probe.predict_sentence(*s.acts, s.targets);
    for (std::size_t t = 0; t < s.targets.size(); ++t) {
      predictions.push_back(std::move(probs[t]));
      golds.push_back(s.targets[t].gold);
    }
  }
  std::vector<std::string> names(probe.config().n_labels);
  if (!golds.empty()) names.resize(golds.front().size());
  return micro_f1(count(predictions, golds, names, threshold));
}

TrainResult train_probe(const ProbeConfig& config, std::span<const TrainingSentence> train,
                        std::span<const TrainingSentence> dev, const TrainOptions& options) {
  std::vector<const TrainingSentence*> pool;
  for (const auto& s : train) {
    if (!s.targets.empty()) pool.push_back(&s);
  }
  if (pool.empty()) throw Error("train split has no targets");
  if (dev.empty()) throw Error("dev split is empty");
  if (options.batch_size == 0 || options.eval_interval == 0) throw Error("batch size and eval interval must be positive");
  if (options.learning_rate < 0.0) throw Error("learning rate must be nonnegative");

  Probe probe(config, ProbeParameters::initialize(config, options.seed));
  TrainState state;
  state.first_moment = ProbeParameters::zeros(config);
  state.second_moment = ProbeParameters::zeros(config);
  state.learning_rate = options.learning_rate;

  TrainResult result;
  result.best = probe.parameters();
  ProbeParameters grads = ProbeParameters::zeros(config);
  std::mt19937_64 rng(options.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<const TrainingSentence*> order = pool;
  std::size_t cursor = order.size();
  double loss_since = 0.0;
  std::size_t batches_since = 0;

  auto validate = [&]() -> bool {
    const double f1 = evaluate_micro_f1(probe, dev, options.threshold);
    result.log.push_back({state.step, batches_since ? loss_since / static_cast<double>(batches_since) : 0.0,
                          f1, state.learning_rate});
    loss_since = 0.0;
    batches_since = 0;
    if (f1 > state.best_dev_f1) {
      state.best_dev_f1 = f1;
      state.validations_since_improvement = 0;
      result.best = probe.parameters();
      result.best_dev_f1 = f1;
      result.best_step = state.step;
      return true;
    }
    ++state.validations_since_improvement;
    if (state.validations_since_improvement >= options.stop_patience) return false;
    if (state.validations_since_improvement % options.lr_patience == 0) state.learning_rate *= 0.5;
    return true;
  };

  std::vector<const TrainingSentence*> batch;
  while (state.step < options.max_steps) {
    batch.clear();
    while (batch.size() < options.batch_size) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(order[cursor++]);
      if (batch.size() == pool.size()) break;
    }
    loss_since += probe.loss_and_gradients(batch, grads);
    ++batches_since;
    clip_by_global_norm(grads, options.clip_norm);
    adam_update(probe.parameters(), grads, state, options);
    if (state.step % options.eval_interval == 0 && !validate()) {
      result.early_stopped = true;
      break;
    }
  }
  if (!result.early_stopped && (result.log.empty() || result.log.back().step != state.step)) validate();
  result.steps = state.step;
  return result;
}

void write_train_log(const std::vector<TrainLogEntry>& log, std::ostream& out) {
  for (const auto& e : log) {
    nlohmann::ordered_json j;
    j["step"] = e.step;
    j["loss"] = e.loss;
    j["dev_f1"] = e.dev_f1;
    j["lr"] = e.learning_rate;
    out << j.dump() << '\n';
  }
}

}  // namespace edgeprobe
