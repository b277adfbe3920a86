// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/probe.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "edgeprobe/error.hpp"
#include "edgeprobe/kernels/kernels.hpp"

namespace edgeprobe {

std::string to_string(InputMode mode) {
  switch (mode) {
    case InputMode::kDirect: return "direct";
    case InputMode::kMix: return "mix";
    case InputMode::kCnn: return "cnn";
  }
  return "?";
}

InputMode input_mode_from_string(std::string_view name) {
  if (name == "direct") return InputMode::kDirect;
  if (name == "mix") return InputMode::kMix;
  if (name == "cnn") return InputMode::kCnn;
  throw Error("unknown probe input mode '" + std::string(name) + "'");
}

void ProbeConfig::validate() const {
  if (input_dim == 0 || projection_dim == 0 || mlp_hidden_dim == 0 || n_labels == 0) {
    throw ShapeError("probe dims and label count must be positive");
  }
  if (n_layers == 0) throw ShapeError("probe needs at least one input layer");
  if (mode == InputMode::kCnn && cnn_width != 1 && cnn_width != 2) {
    throw ShapeError("CNN width must be 1 or 2");
  }
}

namespace {

constexpr int kNone = -1;

struct TensorSpec {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t fan_in;
};

// Canonical tensor order and index lookup shared by parameters and gradients.
struct Layout {
  std::vector<TensorSpec> specs;
  int proj_w[2] = {kNone, kNone};
  int proj_b[2] = {kNone, kNone};
  int cnn_w[2] = {kNone, kNone};
  int cnn_b[2] = {kNone, kNone};
  int att[2] = {kNone, kNone};
  int mlp1_w = kNone, mlp1_b = kNone, mlp2_w = kNone, mlp2_b = kNone;
  int out_w = kNone, out_b = kNone;
  int mix_gamma = kNone, mix_scalars = kNone;

  int add(std::string name, std::vector<std::size_t> shape, std::size_t fan_in) {
    specs.push_back({std::move(name), std::move(shape), fan_in});
    return static_cast<int>(specs.size()) - 1;
  }
};

Layout make_layout(const ProbeConfig& c) {
  c.validate();
  Layout l;
  const std::size_t p = c.projection_dim;
  for (std::size_t k = 0; k < c.span_slots(); ++k) {
    const std::string slot = std::to_string(k + 1);
    if (c.mode == InputMode::kCnn) {
      const std::size_t window = (2 * c.cnn_width + 1) * c.input_dim;
      l.cnn_w[k] = l.add("cnn" + slot + ".weight", {p, window}, window);
      l.cnn_b[k] = l.add("cnn" + slot + ".bias", {p}, window);
    } else {
      l.proj_w[k] = l.add("proj" + slot + ".weight", {p, c.input_dim}, c.input_dim);
      l.proj_b[k] = l.add("proj" + slot + ".bias", {p}, c.input_dim);
    }
    l.att[k] = l.add("att" + slot + ".weight", {p}, p);
  }
  const std::size_t in = c.span_slots() * p;
  const std::size_t h = c.mlp_hidden_dim;
  l.mlp1_w = l.add("mlp1.weight", {h, in}, in);
  l.mlp1_b = l.add("mlp1.bias", {h}, in);
  l.mlp2_w = l.add("mlp2.weight", {h, h}, h);
  l.mlp2_b = l.add("mlp2.bias", {h}, h);
  l.out_w = l.add("out.weight", {c.n_labels, h}, h);
  l.out_b = l.add("out.bias", {c.n_labels}, h);
  if (c.mode == InputMode::kMix) {
    l.mix_gamma = l.add("mix.gamma", {1}, 0);
    l.mix_scalars = l.add("mix.scalars", {c.n_layers}, 0);
  }
  return l;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

ProbeParameters ProbeParameters::zeros(const ProbeConfig& config) {
  ProbeParameters out;
  for (const auto& spec : make_layout(config).specs) out.tensors_.emplace_back(spec.name, spec.shape);
  return out;
}

ProbeParameters ProbeParameters::initialize(const ProbeConfig& config, std::uint64_t seed) {
  const Layout layout = make_layout(config);
  ProbeParameters out = zeros(config);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < layout.specs.size(); ++i) {
    Tensor& t = out.tensors_[i];
    if (static_cast<int>(i) == layout.mix_gamma) {
      t.values[0] = 1.0;
      continue;
    }
    if (static_cast<int>(i) == layout.mix_scalars) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(layout.specs[i].fan_in));
    std::uniform_real_distribution<double> uniform(-bound, bound);
    for (double& v : t.values) v = uniform(rng);
  }
  return out;
}

ProbeParameters ProbeParameters::from_tensors(const ProbeConfig& config, std::vector<Tensor> tensors) {
  const Layout layout = make_layout(config);
  if (tensors.size() != layout.specs.size()) {
    throw ShapeError("checkpoint has " + std::to_string(tensors.size()) + " tensors, probe expects " +
                     std::to_string(layout.specs.size()));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].name != layout.specs[i].name || tensors[i].shape != layout.specs[i].shape) {
      throw ShapeError("checkpoint tensor '" + tensors[i].name + "' does not match expected '" +
                       layout.specs[i].name + "'");
    }
  }
  ProbeParameters out;
  out.tensors_ = std::move(tensors);
  return out;
}

std::vector<const Tensor*> ProbeParameters::tensor_ptrs() const {
  std::vector<const Tensor*> out;
  for (const auto& t : tensors_) out.push_back(&t);
  return out;
}

const Tensor* ProbeParameters::find(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const Tensor& ProbeParameters::at(std::string_view name) const {
  const Tensor* t = find(name);
  if (t == nullptr) throw Error("no parameter tensor named '" + std::string(name) + "'");
  return *t;
}

Tensor& ProbeParameters::at(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

void ProbeParameters::fill(double value) {
  for (auto& t : tensors_) std::fill(t.values.begin(), t.values.end(), value);
}

double ProbeParameters::squared_norm() const {
  double total = 0.0;
  for (const auto& t : tensors_) {
    for (double v : t.values) total += v * v;
  }
  return total;
}

bool ProbeParameters::all_finite() const {
  for (const auto& t : tensors_) {
    for (double v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void project(std::span<const double> input, const Tensor& weight, const Tensor& bias,
             std::span<double> out) {
  if (weight.shape.size() != 2 || weight.shape[1] != input.size() || weight.shape[0] != out.size() ||
      bias.size() != out.size()) {
    throw ShapeError("project: input does not match projection shape");
  }
  kernels::matvec(weight.span(), bias.span(), input, out);
}

PooledSpan attention_pool(const Matrix& projected, const Span& span,
                          std::span<const double> attention) {
  if (span.start >= span.end || span.end > projected.rows) {
    throw ShapeError("attention_pool: span outside sentence");
  }
  if (attention.size() != projected.cols) throw ShapeError("attention_pool: attention size mismatch");
  std::vector<double> scores(span.width());
  for (std::size_t i = span.start; i < span.end; ++i) {
    scores[i - span.start] = kernels::dot(attention, projected.row(i));
  }
  PooledSpan out;
  out.weights = softmax(scores);
  out.vector.assign(projected.cols, 0.0);
  for (std::size_t i = span.start; i < span.end; ++i) {
    kernels::axpy(out.weights[i - span.start], projected.row(i), out.vector);
  }
  return out;
}

double bce_loss(std::span<const double> probabilities, std::span<const std::uint8_t> gold) {
  if (probabilities.size() != gold.size()) throw ShapeError("bce_loss: size mismatch");
  if (probabilities.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t l = 0; l < gold.size(); ++l) {
    const double p = std::clamp(probabilities[l], kProbabilityClamp, 1.0 - kProbabilityClamp);
    total -= gold[l] ? std::log(p) : std::log1p(-p);
  }
  return total / static_cast<double>(gold.size());
}

namespace {

// Per-sentence lazily computed slot vectors and their gradient buffers.
class SentencePass {
 public:
  SentencePass(const ProbeConfig& config, const Layout& layout, const std::vector<Tensor>& params,
               const ActivationSet& acts, std::span<const double> mix_weights)
      : config_(config), layout_(layout), params_(params), acts_(acts), mix_weights_(mix_weights) {
    if (acts.dim() != config.input_dim) {
      throw ShapeError("activation dim " + std::to_string(acts.dim()) + " != probe input_dim " +
                       std::to_string(config.input_dim));
    }
    if (config.mode == InputMode::kMix && acts.n_layers() != config.n_layers) {
      throw ShapeError("activation layer count " + std::to_string(acts.n_layers()) +
                       " != mix layer count " + std::to_string(config.n_layers));
    }
    const std::size_t n = acts.n_tokens();
    inputs_ = Matrix(n, config.input_dim);
    input_ready_.assign(n, 0);
    for (std::size_t k = 0; k < config.span_slots(); ++k) {
      slot_[k] = Matrix(n, config.projection_dim);
      slot_ready_[k].assign(n, 0);
    }
  }

  std::size_t n_tokens() const { return acts_.n_tokens(); }

  void check_span(const Span& s) const {
    if (s.start >= s.end || s.end > acts_.n_tokens()) {
      throw ShapeError("span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                       ") outside sentence of " + std::to_string(acts_.n_tokens()) + " tokens");
    }
  }

  std::span<const double> input(std::size_t i) {
    if (!input_ready_[i]) {
      auto row = inputs_.row(i);
      if (config_.mode == InputMode::kMix) {
        const double gamma = params_[layout_.mix_gamma].values[0];
        std::fill(row.begin(), row.end(), 0.0);
        for (std::size_t l = 0; l < acts_.n_layers(); ++l) {
          auto h = acts_.vec(l, i);
          for (std::size_t d = 0; d < row.size(); ++d) row[d] += mix_weights_[l] * h[d];
        }
        for (double& v : row) v *= gamma;
      } else {
        auto h = acts_.vec(acts_.n_layers() - 1, i);
        std::copy(h.begin(), h.end(), row.begin());
      }
      input_ready_[i] = 1;
    }
    return inputs_.row(i);
  }

  std::span<const double> slot_vector(std::size_t k, std::size_t i) {
    if (!slot_ready_[k][i]) {
      if (config_.mode == InputMode::kCnn) {
        CnnParameters cnn;
        cnn.width = config_.cnn_width;
        const Tensor& w = params_[layout_.cnn_w[k]];
        const Tensor& b = params_[layout_.cnn_b[k]];
        std::vector<double> window(w.shape[1]);
        cnn_window(acts_, 0, i, config_.cnn_width, window);
        kernels::matvec(w.span(), b.span(), window, slot_[k].row(i));
        for (double& v : slot_[k].row(i)) v = std::tanh(v);
      } else {
        kernels::matvec(params_[layout_.proj_w[k]].span(), params_[layout_.proj_b[k]].span(),
                        input(i), slot_[k].row(i));
      }
      slot_ready_[k][i] = 1;
    }
    return slot_[k].row(i);
  }

  std::span<double> slot_grad(std::size_t k, std::size_t i) {
    if (slot_grad_[k].rows == 0) {
      slot_grad_[k] = Matrix(acts_.n_tokens(), config_.projection_dim);
      slot_grad_touched_[k].assign(acts_.n_tokens(), 0);
    }
    slot_grad_touched_[k][i] = 1;
    return slot_grad_[k].row(i);
  }

  // Pushes slot-vector gradients into the projection/CNN tensors and, in
  // mix mode, into the per-layer accumulators.
  void backward(std::vector<Tensor>& grads, std::vector<double>& layer_grad, double& gamma_grad) {
    std::vector<double> input_grad(config_.input_dim);
    std::vector<double> pre_grad(config_.projection_dim);
    for (std::size_t k = 0; k < config_.span_slots(); ++k) {
      if (slot_grad_[k].rows == 0) continue;
      for (std::size_t i = 0; i < acts_.n_tokens(); ++i) {
        if (!slot_grad_touched_[k][i]) continue;
        auto g = slot_grad_[k].row(i);
        if (config_.mode == InputMode::kCnn) {
          auto e = slot_[k].row(i);
          for (std::size_t d = 0; d < pre_grad.size(); ++d) pre_grad[d] = g[d] * (1.0 - e[d] * e[d]);
          Tensor& w = grads[layout_.cnn_w[k]];
          std::vector<double> window(w.shape[1]);
          cnn_window(acts_, 0, i, config_.cnn_width, window);
          kernels::outer_accumulate(pre_grad, window, w.span());
          kernels::axpy(1.0, pre_grad, grads[layout_.cnn_b[k]].span());
        } else {
          kernels::outer_accumulate(g, input(i), grads[layout_.proj_w[k]].span());
          kernels::axpy(1.0, g, grads[layout_.proj_b[k]].span());
          if (config_.mode == InputMode::kMix) {
            std::fill(input_grad.begin(), input_grad.end(), 0.0);
            kernels::matvec_transposed_accumulate(params_[layout_.proj_w[k]].span(), g, input_grad);
            accumulate_mix(i, input_grad, layer_grad, gamma_grad);
          }
        }
      }
    }
  }

 private:
  void accumulate_mix(std::size_t i, std::span<const double> input_grad,
                      std::vector<double>& layer_grad, double& gamma_grad) {
    const double gamma = params_[layout_.mix_gamma].values[0];
    std::vector<double> h(config_.input_dim);
    for (std::size_t l = 0; l < acts_.n_layers(); ++l) {
      auto src = acts_.vec(l, i);
      std::copy(src.begin(), src.end(), h.begin());
      const double g = kernels::dot(input_grad, h);
      layer_grad[l] += gamma * g;
      gamma_grad += mix_weights_[l] * g;
    }
  }

  const ProbeConfig& config_;
  const Layout& layout_;
  const std::vector<Tensor>& params_;
  const ActivationSet& acts_;
  std::span<const double> mix_weights_;
  Matrix inputs_;
  std::vector<std::uint8_t> input_ready_;
  Matrix slot_[2];
  std::vector<std::uint8_t> slot_ready_[2];
  Matrix slot_grad_[2];
  std::vector<std::uint8_t> slot_grad_touched_[2];
};

// Forward state of one target, kept for the backward pass.
struct TargetState {
  Span spans[2];
  std::vector<double> attn[2];
  std::vector<double> features;  // [r1 ; r2]
  std::vector<double> hidden1;
  std::vector<double> hidden2;
  std::vector<double> probs;
};

void pool_slot(SentencePass& pass, std::size_t k, const Span& span, std::span<const double> att,
               std::span<double> pooled, std::vector<double>& weights) {
  std::vector<double> scores(span.width());
  for (std::size_t i = span.start; i < span.end; ++i) {
    scores[i - span.start] = kernels::dot(att, pass.slot_vector(k, i));
  }
  weights = softmax(scores);
  std::fill(pooled.begin(), pooled.end(), 0.0);
  for (std::size_t i = span.start; i < span.end; ++i) {
    kernels::axpy(weights[i - span.start], pass.slot_vector(k, i), pooled);
  }
}

void mlp_forward(const ProbeConfig& c, const Layout& l, const std::vector<Tensor>& p,
                 TargetState& st) {
  st.hidden1.assign(c.mlp_hidden_dim, 0.0);
  st.hidden2.assign(c.mlp_hidden_dim, 0.0);
  st.probs.assign(c.n_labels, 0.0);
  kernels::matvec(p[l.mlp1_w].span(), p[l.mlp1_b].span(), st.features, st.hidden1);
  for (double& v : st.hidden1) v = std::tanh(v);
  kernels::matvec(p[l.mlp2_w].span(), p[l.mlp2_b].span(), st.hidden1, st.hidden2);
  for (double& v : st.hidden2) v = std::tanh(v);
  kernels::matvec(p[l.out_w].span(), p[l.out_b].span(), st.hidden2, st.probs);
  for (double& v : st.probs) v = sigmoid(v);
}

void forward_target(const ProbeConfig& c, const Layout& l, const std::vector<Tensor>& p,
                    SentencePass& pass, const Span& s1, const std::optional<Span>& s2,
                    TargetState& st) {
  if (c.two_span != s2.has_value()) {
    throw ShapeError(c.two_span ? "two-span probe needs span2" : "unary probe got span2");
  }
  const std::size_t proj = c.projection_dim;
  st.features.assign(c.span_slots() * proj, 0.0);
  st.spans[0] = s1;
  if (s2) st.spans[1] = *s2;
  for (std::size_t k = 0; k < c.span_slots(); ++k) {
    pass.check_span(st.spans[k]);
    pool_slot(pass, k, st.spans[k], p[l.att[k]].span(),
              std::span<double>(st.features).subspan(k * proj, proj), st.attn[k]);
  }
  mlp_forward(c, l, p, st);
}

// `scale` is 1 / (targets in batch). Returns this target's loss.
double backward_target(const ProbeConfig& c, const Layout& l, const std::vector<Tensor>& p,
                       SentencePass& pass, const TargetState& st, std::span<const std::uint8_t> gold,
                       double scale, std::vector<Tensor>& g) {
  const std::size_t n_labels = c.n_labels;
  std::vector<double> logit_grad(n_labels);
  for (std::size_t j = 0; j < n_labels; ++j) {
    const double prob = st.probs[j];
    const bool clamped = prob < kProbabilityClamp || prob > 1.0 - kProbabilityClamp;
    logit_grad[j] = clamped ? 0.0 : (prob - gold[j]) * scale / static_cast<double>(n_labels);
  }
  kernels::outer_accumulate(logit_grad, st.hidden2, g[l.out_w].span());
  kernels::axpy(1.0, logit_grad, g[l.out_b].span());

  std::vector<double> h2_grad(c.mlp_hidden_dim, 0.0);
  kernels::matvec_transposed_accumulate(p[l.out_w].span(), logit_grad, h2_grad);
  for (std::size_t d = 0; d < h2_grad.size(); ++d) h2_grad[d] *= 1.0 - st.hidden2[d] * st.hidden2[d];
  kernels::outer_accumulate(h2_grad, st.hidden1, g[l.mlp2_w].span());
  kernels::axpy(1.0, h2_grad, g[l.mlp2_b].span());

  std::vector<double> h1_grad(c.mlp_hidden_dim, 0.0);
  kernels::matvec_transposed_accumulate(p[l.mlp2_w].span(), h2_grad, h1_grad);
  for (std::size_t d = 0; d < h1_grad.size(); ++d) h1_grad[d] *= 1.0 - st.hidden1[d] * st.hidden1[d];
  kernels::outer_accumulate(h1_grad, st.features, g[l.mlp1_w].span());
  kernels::axpy(1.0, h1_grad, g[l.mlp1_b].span());

  std::vector<double> feature_grad(st.features.size(), 0.0);
  kernels::matvec_transposed_accumulate(p[l.mlp1_w].span(), h1_grad, feature_grad);

  const std::size_t proj = c.projection_dim;
  for (std::size_t k = 0; k < c.span_slots(); ++k) {
    std::span<const double> pooled_grad = std::span<const double>(feature_grad).subspan(k * proj, proj);
    const Span& span = st.spans[k];
    const auto& a = st.attn[k];
    auto att = p[l.att[k]].span();
    // d score_i = a_i (pooled_grad . e_i - sum_j a_j pooled_grad . e_j)
    std::vector<double> align(span.width());
    double mean_align = 0.0;
    for (std::size_t i = span.start; i < span.end; ++i) {
      align[i - span.start] = kernels::dot(pooled_grad, pass.slot_vector(k, i));
      mean_align += a[i - span.start] * align[i - span.start];
    }
    for (std::size_t i = span.start; i < span.end; ++i) {
      const std::size_t j = i - span.start;
      const double score_grad = a[j] * (align[j] - mean_align);
      auto e = pass.slot_vector(k, i);
      kernels::axpy(score_grad, e, g[l.att[k]].span());
      auto eg = pass.slot_grad(k, i);
      kernels::axpy(a[j], pooled_grad, eg);
      kernels::axpy(score_grad, att, eg);
    }
  }
  return bce_loss(st.probs, gold);
}

}  // namespace

std::vector<double> predict_from_pooled(const ProbeConfig& config, const ProbeParameters& params,
                                        std::span<const double> pooled1,
                                        std::span<const double> pooled2) {
  const Layout layout = make_layout(config);
  const std::size_t proj = config.projection_dim;
  if (pooled1.size() != proj || (config.two_span ? pooled2.size() != proj : !pooled2.empty())) {
    throw ShapeError("predict: pooled inputs do not match the probe configuration");
  }
  if (params.tensors().size() != layout.specs.size()) throw ShapeError("predict: parameter layout mismatch");
  TargetState st;
  st.features.assign(pooled1.begin(), pooled1.end());
  st.features.insert(st.features.end(), pooled2.begin(), pooled2.end());
  mlp_forward(config, layout, params.tensors(), st);
  return st.probs;
}

Probe::Probe(ProbeConfig config, ProbeParameters params)
    : config_(config), params_(ProbeParameters::from_tensors(config, std::move(params.tensors()))) {}

std::vector<std::vector<double>> Probe::predict_sentence(
    const ActivationSet& acts, const std::vector<LabeledTarget>& targets) const {
  const Layout layout = make_layout(config_);
  std::vector<double> mix_weights;
  if (config_.mode == InputMode::kMix) mix_weights = softmax(params_.tensors()[layout.mix_scalars].values);
  SentencePass pass(config_, layout, params_.tensors(), acts, mix_weights);
  std::vector<std::vector<double>> out;
  out.reserve(targets.size());
  TargetState st;
  for (const auto& t : targets) {
    forward_target(config_, layout, params_.tensors(), pass, t.span1, t.span2, st);
    out.push_back(st.probs);
  }
  return out;
}

std::vector<double> Probe::predict(const ActivationSet& acts, const Span& span1,
                                   const std::optional<Span>& span2) const {
  return predict_sentence(acts, {LabeledTarget{span1, span2, {}}}).front();
}

double Probe::loss(std::span<const TrainingSentence* const> batch) const { return run(batch, nullptr); }

double Probe::loss_and_gradients(std::span<const TrainingSentence* const> batch,
                                 ProbeParameters& grads) const {
  if (grads.tensors().size() != params_.tensors().size()) grads = ProbeParameters::zeros(config_);
  grads.fill(0.0);
  return run(batch, &grads);
}

double Probe::run(std::span<const TrainingSentence* const> batch, ProbeParameters* grads) const {
  const Layout layout = make_layout(config_);
  const auto& p = params_.tensors();
  std::size_t total_targets = 0;
  for (const auto* s : batch) total_targets += s->targets.size();
  if (total_targets == 0) return 0.0;
  const double scale = 1.0 / static_cast<double>(total_targets);

  std::vector<double> mix_weights;
  if (config_.mode == InputMode::kMix) mix_weights = softmax(p[layout.mix_scalars].values);
  std::vector<double> layer_grad(config_.n_layers, 0.0);
  double gamma_grad = 0.0;

  double loss_sum = 0.0;
  TargetState st;
  for (const auto* sentence : batch) {
    if (sentence->targets.empty()) continue;
    SentencePass pass(config_, layout, p, *sentence->acts, mix_weights);
    for (const auto& t : sentence->targets) {
      if (t.gold.size() != config_.n_labels) throw ShapeError("gold vector size != n_labels");
      forward_target(config_, layout, p, pass, t.span1, t.span2, st);
      if (grads != nullptr) {
        loss_sum += backward_target(config_, layout, p, pass, st, t.gold, scale, grads->tensors());
      } else {
        loss_sum += bce_loss(st.probs, t.gold);
      }
    }
    if (grads != nullptr) pass.backward(grads->tensors(), layer_grad, gamma_grad);
  }

  if (grads != nullptr && config_.mode == InputMode::kMix) {
    auto& g = grads->tensors();
    g[layout.mix_gamma].values[0] += gamma_grad;
    double mean = 0.0;
    for (std::size_t l = 0; l < layer_grad.size(); ++l) mean += mix_weights[l] * layer_grad[l];
    for (std::size_t l = 0; l < layer_grad.size(); ++l) {
      g[layout.mix_scalars].values[l] += mix_weights[l] * (layer_grad[l] - mean);
    }
  }
  return loss_sum * scale;
}

}  // namespace edgeprobe
