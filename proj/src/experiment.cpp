// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "edgeprobe/activation_io.hpp"
#include "edgeprobe/error.hpp"

namespace edgeprobe {
namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "name", "task", "encoder", "seed", "encoder_seed",
      "train", "dev", "test", "activations.train", "activations.dev", "activations.test",
      "embeddings", "eval_interval", "max_steps", "lr", "batch_size", "clip_norm", "threshold",
      "lr_patience", "stop_patience", "projection_dim", "mlp_hidden_dim", "state_dim",
      "ortho_layers", "max_distance", "output_dir"};
  return keys;
}

bool is_path_key(const std::string& key) {
  return key == "train" || key == "dev" || key == "test" || key.rfind("activations.", 0) == 0 ||
         key == "embeddings" || key == "output_dir";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<std::size_t> random_embedding_dim(const std::string& spec) {
  if (spec.rfind("random:", 0) != 0) return std::nullopt;
  std::size_t dim = 0;
  const std::string tail = spec.substr(7);
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), dim);
  if (ec != std::errc() || ptr != tail.data() + tail.size() || dim == 0) {
    throw ValidationError("embeddings: bad random spec '" + spec + "'");
  }
  return dim;
}

bool needs_layer0(EncoderMode mode) {
  return mode == EncoderMode::kLexical || mode == EncoderMode::kCnn1 || mode == EncoderMode::kCnn2 ||
         mode == EncoderMode::kOrtho;
}

EmbeddingTable embedding_table(const ExperimentConfig& config) {
  const std::string spec = config.get("embeddings");
  if (auto dim = random_embedding_dim(spec)) {
    std::vector<std::string> vocab;
    for (const char* key : {"train", "dev", "test"}) {
      if (!config.has(key)) continue;
      for (const auto& ex : read_jsonl(config.path(key))) {
        vocab.insert(vocab.end(), ex.tokens.begin(), ex.tokens.end());
      }
    }
    return EmbeddingTable::random(std::move(vocab), *dim, config.get_uint("encoder_seed", 0));
  }
  return EmbeddingTable::load_text(config.path("embeddings"));
}

std::vector<ActivationSet> load_acts(const ExperimentConfig& config, const Split& examples,
                                     const std::string& split_name,
                                     const std::optional<std::filesystem::path>& acts_override) {
  if (acts_override) return load_paired_activations(*acts_override, examples);
  const std::string key = "activations." + split_name;
  if (!config.has(key)) throw ValidationError("missing config key " + key);
  return load_paired_activations(config.path(key), examples);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(EncoderMode mode) {
  switch (mode) {
    case EncoderMode::kLexical: return "lexical";
    case EncoderMode::kCnn1: return "cnn1";
    case EncoderMode::kCnn2: return "cnn2";
    case EncoderMode::kOrtho: return "ortho";
    case EncoderMode::kMix: return "mix";
    case EncoderMode::kCat: return "cat";
    case EncoderMode::kDirect: return "direct";
  }
  return "?";
}

EncoderMode encoder_mode_from_string(const std::string& name) {
  for (auto m : {EncoderMode::kLexical, EncoderMode::kCnn1, EncoderMode::kCnn2, EncoderMode::kOrtho,
                 EncoderMode::kMix, EncoderMode::kCat, EncoderMode::kDirect}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown encoder '" + name + "'");
}

// ---- ExperimentConfig -------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      config.set(t);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  ExperimentConfig config = parse(in);
  config.base_dir = path.parent_path();
  return config;
}

void ExperimentConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ValidationError("expected key=value, got '" + assignment + "'");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ValidationError("unknown config key '" + key + "'");
  values_[key] = value;
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::uint64_t v = 0;
  const std::string& s = it->second;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used == it->second.size()) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(key + ": expected a number, got '" + it->second + "'");
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    std::string value = v;
    if (is_path_key(k) && !random_embedding_dim(v)) value = std::filesystem::absolute(path(k)).lexically_normal().string();
    out += k + "=" + value + "\n";
  }
  return out;
}

EncoderMode ExperimentConfig::encoder() const {
  if (!has("encoder")) throw ValidationError("missing config key encoder");
  return encoder_mode_from_string(get("encoder"));
}

TrainOptions ExperimentConfig::train_options() const {
  TrainOptions o;
  o.learning_rate = get_double("lr", o.learning_rate);
  o.batch_size = get_uint("batch_size", o.batch_size);
  o.clip_norm = get_double("clip_norm", o.clip_norm);
  o.eval_interval = get_uint("eval_interval", o.eval_interval);
  o.lr_patience = get_uint("lr_patience", o.lr_patience);
  o.stop_patience = get_uint("stop_patience", o.stop_patience);
  o.max_steps = get_uint("max_steps", o.max_steps);
  o.threshold = get_double("threshold", o.threshold);
  o.seed = get_uint("seed", o.seed);
  return o;
}

std::filesystem::path ExperimentConfig::path(const std::string& key) const {
  std::filesystem::path p = get(key);
  if (p.empty()) throw ValidationError("missing config key " + key);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

void validate_config(const ExperimentConfig& config) {
  const EncoderMode mode = config.encoder();
  auto require_file = [&](const std::string& key) {
    const auto p = config.path(key);
    if (!std::filesystem::exists(p)) throw ValidationError(key + ": no such file " + p.string());
  };
  require_file("train");
  require_file("dev");
  if (config.has("test")) require_file("test");
  const bool embeddings = config.has("embeddings");
  if (embeddings && !random_embedding_dim(config.get("embeddings"))) require_file("embeddings");
  if (!needs_layer0(mode) || !embeddings) {
    require_file("activations.train");
    require_file("activations.dev");
    if (config.has("test")) require_file("activations.test");
  }
  if (mode == EncoderMode::kOrtho && config.get_uint("ortho_layers", 2) == 0) {
    throw ValidationError("ortho_layers must be positive");
  }
  (void)config.train_options();
}

// ---- Representations --------------------------------------------------------

Representations build_representations(const ExperimentConfig& config, const Split& examples,
                                      const std::string& split_name,
                                      const std::optional<std::filesystem::path>& acts_override) {
  const EncoderMode mode = config.encoder();
  Representations reps;
  if (needs_layer0(mode)) {
    if (config.has("embeddings") && !acts_override) {
      const EmbeddingTable table = embedding_table(config);
      for (const auto& ex : examples) reps.sets.push_back(lexical_encode(ex.tokens, table));
    } else {
      for (auto& acts : load_acts(config, examples, split_name, acts_override)) {
        reps.sets.push_back(acts.layer(0));
      }
    }
    if (mode == EncoderMode::kOrtho && !reps.sets.empty()) {
      OrthonormalEncoderConfig oc;
      oc.seed = config.get_uint("encoder_seed", 0);
      oc.layers = config.get_uint("ortho_layers", oc.layers);
      oc.state_dim = config.get_uint("state_dim", oc.state_dim);
      const OrthonormalRecurrentEncoder encoder(reps.sets.front().dim(), oc);
      for (auto& s : reps.sets) s = encoder.encode(s);
    }
  } else {
    reps.sets = load_acts(config, examples, split_name, acts_override);
    if (!reps.sets.empty()) {
      const std::uint32_t layers = reps.sets.front().n_layers();
      if ((mode == EncoderMode::kMix || mode == EncoderMode::kCat) && layers < 2) {
        throw ValidationError("encoder " + to_string(mode) + " needs at least 2 activation layers, got " +
                              std::to_string(layers));
      }
    }
    if (mode == EncoderMode::kCat) {
      for (auto& s : reps.sets) s = concat_encode(s);
    } else if (mode == EncoderMode::kDirect) {
      for (auto& s : reps.sets) s = s.layer(s.n_layers() - 1);
    }
  }
  if (!reps.sets.empty()) {
    reps.input_dim = reps.sets.front().dim();
    reps.n_layers = reps.sets.front().n_layers();
  }
  return reps;
}

ProbeConfig probe_config_for(const ExperimentConfig& config, const Representations& reps,
                             std::size_t n_labels, bool two_span) {
  ProbeConfig pc;
  pc.input_dim = reps.input_dim;
  pc.projection_dim = config.get_uint("projection_dim", pc.projection_dim);
  pc.mlp_hidden_dim = config.get_uint("mlp_hidden_dim", pc.mlp_hidden_dim);
  pc.n_labels = n_labels;
  pc.two_span = two_span;
  pc.n_layers = reps.n_layers;
  switch (config.encoder()) {
    case EncoderMode::kCnn1:
    case EncoderMode::kCnn2:
      pc.mode = InputMode::kCnn;
      pc.cnn_width = config.encoder() == EncoderMode::kCnn1 ? 1 : 2;
      break;
    case EncoderMode::kOrtho:
    case EncoderMode::kMix:
      pc.mode = InputMode::kMix;
      break;
    default:
      pc.mode = InputMode::kDirect;
  }
  pc.validate();
  return pc;
}

std::vector<TrainingSentence> training_sentences(const Split& examples,
                                                 const std::vector<ActivationSet>& sets,
                                                 const LabelVocabulary& vocab) {
  if (examples.size() != sets.size()) throw ShapeError("examples and activation sets differ in count");
  std::vector<TrainingSentence> out(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    out[i].acts = &sets[i];
    for (const auto& t : examples[i].targets) out[i].targets.push_back({t.span1, t.span2, binarize(t, vocab)});
  }
  return out;
}

EvalReport evaluate_split(const Probe& probe, const Split& examples,
                          const std::vector<ActivationSet>& sets, const LabelVocabulary& vocab,
                          const EvalOptions& options) {
  const auto sentences = training_sentences(examples, sets, vocab);
  std::vector<Target> targets;
  std::vector<std::vector<double>> predictions;
  std::vector<std::vector<std::uint8_t>> golds;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (sentences[i].targets.empty()) continue;
    auto probs = probe.predict_sentence(*sentences[i].acts, sentences[i].targets);
    for (std::size_t t = 0; t < probs.size(); ++t) {
      targets.push_back(examples[i].targets[t]);
      predictions.push_back(std::move(probs[t]));
      golds.push_back(sentences[i].targets[t].gold);
    }
  }
  return evaluate(targets, predictions, golds, vocab.labels(), options);
}

// ---- Runs -------------------------------------------------------------------

nlohmann::ordered_json to_json(const ProbeConfig& config) {
  nlohmann::ordered_json j;
  j["input_dim"] = config.input_dim;
  j["projection_dim"] = config.projection_dim;
  j["mlp_hidden_dim"] = config.mlp_hidden_dim;
  j["n_labels"] = config.n_labels;
  j["two_span"] = config.two_span;
  j["mode"] = to_string(config.mode);
  j["n_layers"] = config.n_layers;
  j["cnn_width"] = config.cnn_width;
  return j;
}

ProbeConfig probe_config_from_json(const nlohmann::json& j) {
  try {
    ProbeConfig c;
    c.input_dim = j.at("input_dim").get<std::size_t>();
    c.projection_dim = j.at("projection_dim").get<std::size_t>();
    c.mlp_hidden_dim = j.at("mlp_hidden_dim").get<std::size_t>();
    c.n_labels = j.at("n_labels").get<std::size_t>();
    c.two_span = j.at("two_span").get<bool>();
    c.mode = input_mode_from_string(j.at("mode").get<std::string>());
    c.n_layers = j.at("n_layers").get<std::size_t>();
    c.cnn_width = j.at("cnn_width").get<std::size_t>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("probe config: ") + e.what());
  }
}

RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& run_dir) {
  if (std::filesystem::exists(run_dir)) throw Error("run directory already exists: " + run_dir.string());
  validate_config(config);

  auto load_split = [&](const std::string& key) {
    Split s = read_jsonl(config.path(key));
    if (auto problems = validate(s); !problems.empty()) throw ValidationError(key + ": " + problems.front());
    return s;
  };
  const Split train = load_split("train");
  const Split dev = load_split("dev");
  const bool has_test = config.has("test");
  const Split test = has_test ? load_split("test") : Split{};

  const LabelVocabulary vocab = LabelVocabulary::from_split(train);
  if (vocab.empty()) throw ValidationError("train split has no labels");
  const bool two_span = std::any_of(train.begin(), train.end(), [](const EdgeExample& ex) {
    return std::any_of(ex.targets.begin(), ex.targets.end(), [](const Target& t) { return t.is_binary(); });
  });

  const Representations train_reps = build_representations(config, train, "train");
  const Representations dev_reps = build_representations(config, dev, "dev");
  const ProbeConfig pc = probe_config_for(config, train_reps, vocab.size(), two_span);
  if (!dev_reps.sets.empty() && (dev_reps.input_dim != pc.input_dim || dev_reps.n_layers != pc.n_layers)) {
    throw ShapeError("dev activations do not match train activations in shape");
  }

  const auto train_sents = training_sentences(train, train_reps.sets, vocab);
  const LabelVocabulary dev_vocab = vocab.extended_with(dev);
  const auto dev_sents = training_sentences(dev, dev_reps.sets, dev_vocab);
  const TrainOptions options = config.train_options();

  RunSummary summary;
  summary.run_dir = run_dir;
  summary.train = train_probe(pc, train_sents, dev_sents, options);
  // evaluate what the checkpoint stores
  for (auto& t : summary.train.best.tensors()) {
    for (auto& v : t.values) v = static_cast<float>(v);
  }
  const Probe probe(pc, summary.train.best);

  EvalOptions eval_options;
  eval_options.threshold = options.threshold;
  eval_options.by_label = true;
  if (config.has("max_distance") && two_span) {
    eval_options.max_distance = static_cast<std::uint32_t>(config.get_uint("max_distance", 0));
  }
  if (has_test) {
    const Representations test_reps = build_representations(config, test, "test");
    summary.report = evaluate_split(probe, test, test_reps.sets, vocab.extended_with(test), eval_options);
  } else {
    summary.report = evaluate_split(probe, dev, dev_reps.sets, dev_vocab, eval_options);
  }

  std::filesystem::create_directories(run_dir.parent_path().empty() ? "." : run_dir.parent_path());
  if (!std::filesystem::create_directory(run_dir)) {
    throw Error("run directory already exists: " + run_dir.string());
  }
  write_text(run_dir / "config.txt", config.to_text());
  std::string labels;
  for (const auto& l : vocab.labels()) labels += l + "\n";
  write_text(run_dir / "labels.txt", labels);
  write_text(run_dir / "probe.json", to_json(pc).dump(2) + "\n");
  write_tensors(summary.train.best.tensor_ptrs(), run_dir / "checkpoint.epp");
  {
    std::ofstream log(run_dir / "train_log.jsonl", std::ios::binary);
    write_train_log(summary.train.log, log);
  }
  auto report_json = to_json(summary.report);
  report_json["name"] = config.name();
  report_json["encoder"] = to_string(config.encoder());
  report_json["seed"] = options.seed;
  report_json["best_step"] = summary.train.best_step;
  report_json["best_dev_f1"] = summary.train.best_dev_f1;
  write_text(run_dir / "report.json", report_json.dump(2) + "\n");
  return summary;
}

LoadedRun load_run(const std::filesystem::path& run_dir) {
  LoadedRun run;
  run.config = ExperimentConfig::load(run_dir / "config.txt");
  std::vector<std::string> labels;
  std::istringstream in(read_text(run_dir / "labels.txt"));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) labels.push_back(line);
  }
  run.vocab = LabelVocabulary(std::move(labels));
  try {
    run.probe_config = probe_config_from_json(nlohmann::json::parse(read_text(run_dir / "probe.json")));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("probe.json: ") + e.what());
  }
  if (run.probe_config.n_labels != run.vocab.size()) throw ShapeError("labels.txt does not match probe.json");
  run.params = ProbeParameters::from_tensors(run.probe_config, read_tensors(run_dir / "checkpoint.epp"));
  return run;
}

// ---- Comparison table ---------------------------------------------------------

std::vector<ComparisonRow> compare_runs(const std::vector<std::string>& names,
                                        const std::vector<EvalReport>& reports,
                                        const std::optional<std::string>& baseline) {
  if (names.size() != reports.size()) throw ShapeError("names and reports differ in count");
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> f1s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!f1s.count(names[i])) order.push_back(names[i]);
    f1s[names[i]].push_back(reports[i].micro_f1);
  }
  std::vector<ComparisonRow> rows;
  for (const auto& n : order) rows.push_back({n, summarize(f1s[n]), std::nullopt});
  if (baseline) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const ComparisonRow& r) { return r.name == *baseline; });
    if (it == rows.end()) throw Error("baseline run '" + *baseline + "' not found");
    const double base = it->f1.mean;
    for (auto& r : rows) {
      if (r.name != *baseline) r.delta = r.f1.mean - base;
    }
  }
  return rows;
}

std::string comparison_text(const std::vector<ComparisonRow>& rows) {
  std::size_t width = 4;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %4s %7s %7s %7s %7s\n", static_cast<int>(width), "name", "runs", "F1",
                "min", "max", "delta");
  out += buf;
  for (const auto& r : rows) {
    std::string delta;
    if (r.delta) {
      char d[32];
      std::snprintf(d, sizeof d, "%+.2f", 100.0 * *r.delta);
      delta = d;
    }
    std::snprintf(buf, sizeof buf, "%-*s %4zu %7.2f %7.2f %7.2f %7s\n", static_cast<int>(width), r.name.c_str(),
                  r.f1.runs, 100.0 * r.f1.mean, 100.0 * r.f1.min, 100.0 * r.f1.max, delta.c_str());
    out += buf;
  }
  return out;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "name,runs,f1,f1_min,f1_max,delta\n";
  for (const auto& r : rows) {
    out += r.name + "," + std::to_string(r.f1.runs) + "," + format_double(r.f1.mean) + "," +
           format_double(r.f1.min) + "," + format_double(r.f1.max) + "," +
           (r.delta ? format_double(*r.delta) : std::string()) + "\n";
  }
  return out;
}

}  // namespace edgeprobe
