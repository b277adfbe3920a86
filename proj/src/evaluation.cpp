// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "edgeprobe/error.hpp"

namespace edgeprobe {

LabelCounts ConfusionCounts::total() const {
  LabelCounts out;
  for (const auto& c : per_label) out += c;
  return out;
}

LabelCounts ConfusionCounts::total(std::span<const std::string> subset) const {
  LabelCounts out;
  for (const auto& name : subset) {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw UnknownLabel(name);
    out += per_label[static_cast<std::size_t>(it - labels.begin())];
  }
  return out;
}

ConfusionCounts count(const std::vector<std::vector<double>>& predictions,
                      const std::vector<std::vector<std::uint8_t>>& golds,
                      const std::vector<std::string>& labels, double threshold) {
  if (predictions.size() != golds.size()) {
    throw ShapeError("count: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(golds.size()) + " gold vectors");
  }
  ConfusionCounts out;
  out.labels = labels;
  out.per_label.assign(labels.size(), {});
  out.n_targets = predictions.size();
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    const auto& p = predictions[t];
    const auto& y = golds[t];
    if (y.size() != labels.size() || p.size() > y.size()) {
      throw ShapeError("count: vector length mismatch at target " + std::to_string(t));
    }
    for (std::size_t l = 0; l < y.size(); ++l) {
      const bool predicted = l < p.size() && p[l] >= threshold;
      if (predicted && y[l]) {
        ++out.per_label[l].tp;
      } else if (predicted) {
        ++out.per_label[l].fp;
      } else if (y[l]) {
        ++out.per_label[l].fn;
      }
    }
  }
  return out;
}

double f1_score(const LabelCounts& c) {
  const double tp = static_cast<double>(c.tp);
  if (c.tp == 0) return 0.0;
  const double precision = tp / static_cast<double>(c.tp + c.fp);
  const double recall = tp / static_cast<double>(c.tp + c.fn);
  return 2.0 * precision * recall / (precision + recall);
}

double micro_f1(const ConfusionCounts& counts) { return f1_score(counts.total()); }

double micro_f1(const ConfusionCounts& counts, std::span<const std::string> subset) {
  return f1_score(counts.total(subset));
}

ConfidenceInterval normal_ci(double f1, std::uint64_t n) {
  if (n == 0) throw Error("normal_ci: n must be at least 1");
  const double half = 1.96 * std::sqrt(std::max(0.0, f1 * (1.0 - f1)) / static_cast<double>(n));
  return {std::clamp(f1 - half, 0.0, 1.0), std::clamp(f1 + half, 0.0, 1.0)};
}

std::uint32_t span_distance(const Span& a, const Span& b) {
  const Span& earlier = a.start <= b.start ? a : b;
  const Span& later = a.start <= b.start ? b : a;
  return later.start > earlier.end ? later.start - earlier.end : 0;
}

namespace {

SliceReport make_slice(std::string name, const LabelCounts& counts, std::uint64_t n) {
  SliceReport s;
  s.name = std::move(name);
  s.counts = counts;
  s.f1 = f1_score(counts);
  s.n = n;
  if (n > 0) s.ci = normal_ci(s.f1, n);
  return s;
}

std::vector<std::size_t> label_positions(const std::vector<std::string>& labels,
                                         std::span<const std::string> subset) {
  std::vector<std::size_t> out;
  for (const auto& name : subset) {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw UnknownLabel(name);
    out.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  return out;
}

}  // namespace

std::vector<SliceReport> stratify_by_distance(const std::vector<Target>& targets,
                                              const std::vector<std::vector<double>>& predictions,
                                              const std::vector<std::vector<std::uint8_t>>& golds,
                                              const std::vector<std::string>& labels,
                                              std::uint32_t max_bucket, double threshold) {
  if (targets.size() != predictions.size()) throw ShapeError("stratify: target/prediction count mismatch");
  const std::size_t n_buckets = static_cast<std::size_t>(max_bucket) + 2;
  std::vector<std::vector<std::vector<double>>> bucket_preds(n_buckets);
  std::vector<std::vector<std::vector<std::uint8_t>>> bucket_golds(n_buckets);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (!targets[t].span2) throw ValidationError("distance stratification needs binary-span targets");
    const std::uint32_t d = span_distance(targets[t].span1, *targets[t].span2);
    const std::size_t b = d <= max_bucket ? d : max_bucket + 1;
    bucket_preds[b].push_back(predictions[t]);
    bucket_golds[b].push_back(golds.at(t));
  }
  std::vector<SliceReport> out;
  for (std::size_t b = 0; b < n_buckets; ++b) {
    const ConfusionCounts c = count(bucket_preds[b], bucket_golds[b], labels, threshold);
    const std::string name = b <= max_bucket ? std::to_string(b) : std::to_string(max_bucket + 1) + "+";
    out.push_back(make_slice(name, c.total(), c.n_targets));
  }
  return out;
}

EvalReport evaluate(const std::vector<Target>& targets,
                    const std::vector<std::vector<double>>& predictions,
                    const std::vector<std::vector<std::uint8_t>>& golds,
                    const std::vector<std::string>& labels, const EvalOptions& options) {
  const ConfusionCounts counts = count(predictions, golds, labels, options.threshold);
  EvalReport r;
  r.threshold = options.threshold;
  r.n = counts.n_targets;
  r.counts = counts.total();
  r.micro_f1 = f1_score(r.counts);
  if (r.n > 0) r.ci = normal_ci(r.micro_f1, r.n);

  if (options.by_label) {
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const LabelCounts& c = counts.per_label[l];
      r.labels.push_back(make_slice(labels[l], c, c.tp + c.fn));
    }
  }
  for (const auto& [name, subset] : options.label_sets) {
    const auto positions = label_positions(labels, subset);
    std::uint64_t n = 0;
    for (const auto& y : golds) {
      if (std::any_of(positions.begin(), positions.end(), [&](std::size_t p) { return y[p] != 0; })) ++n;
    }
    r.label_sets.push_back(make_slice(name, counts.total(subset), n));
  }
  if (options.max_distance) {
    r.distance = stratify_by_distance(targets, predictions, golds, labels, *options.max_distance,
                                      options.threshold);
  }
  return r;
}

namespace {

nlohmann::ordered_json slice_json(const SliceReport& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["f1"] = s.f1;
  j["n"] = s.n;
  j["tp"] = s.counts.tp;
  j["fp"] = s.counts.fp;
  j["fn"] = s.counts.fn;
  if (s.ci) {
    j["ci"] = {s.ci->lo, s.ci->hi};
  } else {
    j["ci"] = nullptr;
  }
  return j;
}

SliceReport slice_from_json(const nlohmann::json& j) {
  SliceReport s;
  s.name = j.at("name").get<std::string>();
  s.f1 = j.at("f1").get<double>();
  s.n = j.at("n").get<std::uint64_t>();
  s.counts = {j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(),
              j.at("fn").get<std::uint64_t>()};
  if (j.contains("ci") && !j["ci"].is_null()) s.ci = ConfidenceInterval{j["ci"][0], j["ci"][1]};
  return s;
}

std::string fmt(double v, int precision = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["threshold"] = r.threshold;
  j["n"] = r.n;
  j["micro_f1"] = r.micro_f1;
  if (r.ci) {
    j["ci"] = {r.ci->lo, r.ci->hi};
  } else {
    j["ci"] = nullptr;
  }
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["fn"] = r.counts.fn;
  auto list = [](const std::vector<SliceReport>& slices) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& s : slices) a.push_back(slice_json(s));
    return a;
  };
  j["labels"] = list(r.labels);
  j["label_sets"] = list(r.label_sets);
  j["distance"] = list(r.distance);
  return j;
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.threshold = j.at("threshold").get<double>();
  r.n = j.at("n").get<std::uint64_t>();
  r.micro_f1 = j.at("micro_f1").get<double>();
  if (!j.at("ci").is_null()) r.ci = ConfidenceInterval{j["ci"][0], j["ci"][1]};
  r.counts = {j.at("tp").get<std::uint64_t>(), j.at("fp").get<std::uint64_t>(),
              j.at("fn").get<std::uint64_t>()};
  for (const auto& s : j.at("labels")) r.labels.push_back(slice_from_json(s));
  for (const auto& s : j.at("label_sets")) r.label_sets.push_back(slice_from_json(s));
  for (const auto& s : j.at("distance")) r.distance.push_back(slice_from_json(s));
  return r;
}

std::string to_text(const EvalReport& r) {
  std::ostringstream out;
  char line[256];
  auto row = [&](const std::string& name, double f1, std::uint64_t n,
                 const std::optional<ConfidenceInterval>& ci) {
    const std::string interval = ci ? "[" + fmt(ci->lo) + ", " + fmt(ci->hi) + "]" : "-";
    std::snprintf(line, sizeof line, "%-24s %8s %10llu  %s\n", name.c_str(), fmt(f1).c_str(),
                  static_cast<unsigned long long>(n), interval.c_str());
    out << line;
  };
  std::snprintf(line, sizeof line, "%-24s %8s %10s  %s\n", "slice", "F1", "n", "95% CI");
  out << line;
  row("overall", r.micro_f1, r.n, r.ci);
  for (const auto& s : r.label_sets) row(s.name, s.f1, s.n, s.ci);
  for (const auto& s : r.labels) row("label:" + s.name, s.f1, s.n, s.ci);
  for (const auto& s : r.distance) row("distance:" + s.name, s.f1, s.n, s.ci);
  return out.str();
}

std::string distance_csv(const EvalReport& r) {
  std::ostringstream out;
  out << "bucket,n,f1,ci_lo,ci_hi,tp,fp,fn\n";
  for (const auto& s : r.distance) {
    out << s.name << ',' << s.n << ',' << fmt(s.f1, 6) << ',' << (s.ci ? fmt(s.ci->lo, 6) : "") << ','
        << (s.ci ? fmt(s.ci->hi, 6) : "") << ',' << s.counts.tp << ',' << s.counts.fp << ','
        << s.counts.fn << '\n';
  }
  return out.str();
}

RunSpread summarize(std::span<const double> values) {
  if (values.empty()) throw Error("summarize: no values");
  RunSpread s;
  s.runs = values.size();
  // sort first so the mean does not depend on input order
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double v : sorted) total += v;
  s.mean = total / static_cast<double>(sorted.size());
  s.min = sorted.front();
  s.max = sorted.back();
  return s;
}

MultiRunSummary multi_run_average(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw Error("multi_run_average: no reports");
  MultiRunSummary out;
  std::vector<double> overall;
  std::map<std::string, std::vector<double>> slices;
  for (const auto& r : reports) {
    overall.push_back(r.micro_f1);
    for (const auto& s : r.label_sets) slices[s.name].push_back(s.f1);
    for (const auto& s : r.labels) slices["label:" + s.name].push_back(s.f1);
  }
  out.micro_f1 = summarize(overall);
  for (const auto& [name, values] : slices) out.slices[name] = summarize(values);
  return out;
}

std::vector<std::string> expand_label_pattern(const std::string& pattern,
                                              const std::vector<std::string>& available) {
  std::vector<std::string> out;
  if (auto dots = pattern.find(".."); dots != std::string::npos) {
    const std::string lo = pattern.substr(0, dots);
    const std::string hi = pattern.substr(dots + 2);
    auto digits_at = [](const std::string& s) {
      std::size_t i = s.size();
      while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
      return i;
    };
    const std::size_t lp = digits_at(lo);
    const std::size_t hp = digits_at(hi);
    if (lp == lo.size() || hp == hi.size() || lo.substr(0, lp) != hi.substr(0, hp)) {
      throw Error("bad label range '" + pattern + "'");
    }
    const std::string prefix = lo.substr(0, lp);
    const int first = std::stoi(lo.substr(lp));
    const int last = std::stoi(hi.substr(hp));
    for (int v = first; v <= last; ++v) {
      const std::string name = prefix + std::to_string(v);
      if (std::find(available.begin(), available.end(), name) != available.end()) out.push_back(name);
    }
    return out;
  }
  if (!pattern.empty() && pattern.back() == '*') {
    const std::string prefix = pattern.substr(0, pattern.size() - 1);
    for (const auto& l : available) {
      if (l.compare(0, prefix.size(), prefix) == 0) out.push_back(l);
    }
    return out;
  }
  std::stringstream ss(pattern);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace edgeprobe
