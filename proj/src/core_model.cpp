// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/core_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "edgeprobe/error.hpp"

namespace edgeprobe {

using json = nlohmann::ordered_json;

LabelVocabulary::LabelVocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
}

LabelVocabulary LabelVocabulary::from_split(const Split& examples) {
  std::vector<std::string> labels;
  for (const auto& ex : examples) {
    for (const auto& t : ex.targets) labels.insert(labels.end(), t.labels.begin(), t.labels.end());
  }
  return LabelVocabulary(std::move(labels));
}

std::optional<std::size_t> LabelVocabulary::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelVocabulary::index(const std::string& label) const {
  auto found = find(label);
  if (!found) throw UnknownLabel(label);
  return *found;
}

LabelVocabulary LabelVocabulary::extended_with(const Split& examples) const {
  std::set<std::string> extra;
  for (const auto& ex : examples) {
    for (const auto& t : ex.targets) {
      for (const auto& l : t.labels) {
        if (!find(l)) extra.insert(l);
      }
    }
  }
  LabelVocabulary out;
  out.labels_ = labels_;
  out.labels_.insert(out.labels_.end(), extra.begin(), extra.end());
  for (std::size_t i = 0; i < out.labels_.size(); ++i) out.index_.emplace(out.labels_[i], i);
  return out;
}

std::vector<std::string> TaskDataset::unseen_labels() const {
  std::set<std::string> unseen;
  for (const Split* split : {&dev, &test}) {
    for (const auto& ex : *split) {
      for (const auto& t : ex.targets) {
        for (const auto& l : t.labels) {
          if (!vocab.find(l)) unseen.insert(l);
        }
      }
    }
  }
  return {unseen.begin(), unseen.end()};
}

std::vector<std::uint8_t> binarize(const Target& target, const LabelVocabulary& vocab) {
  std::vector<std::uint8_t> out(vocab.size(), 0);
  for (const auto& l : target.labels) out[vocab.index(l)] = 1;
  return out;
}

namespace {

std::string describe_span(const Span& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + ")";
}

void check_span(const Span& s, std::size_t n_tokens, const std::string& where,
                std::vector<std::string>& out) {
  if (s.start >= s.end) {
    out.push_back(where + ": span " + describe_span(s) + ": start < end required");
  } else if (s.end > n_tokens) {
    out.push_back(where + ": span " + describe_span(s) + " exceeds token count " +
                  std::to_string(n_tokens));
  }
}

void validate_example(const EdgeExample& ex, const std::string& where,
                      std::vector<std::string>& out) {
  for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
    const auto& tok = ex.tokens[i];
    if (tok.empty()) {
      out.push_back(where + ": token " + std::to_string(i) + " is empty");
    } else if (tok.find_first_of(" \t\n\r") != std::string::npos) {
      out.push_back(where + ": token " + std::to_string(i) + " contains whitespace");
    }
  }
  for (std::size_t t = 0; t < ex.targets.size(); ++t) {
    const Target& target = ex.targets[t];
    const std::string tw = where + " target " + std::to_string(t);
    check_span(target.span1, ex.tokens.size(), tw, out);
    if (target.span2) check_span(*target.span2, ex.tokens.size(), tw, out);
    std::set<std::string> seen;
    for (const auto& l : target.labels) {
      if (l.empty()) out.push_back(tw + ": empty label string");
      if (!seen.insert(l).second) out.push_back(tw + ": duplicate label '" + l + "'");
    }
  }
}

}  // namespace

std::vector<std::string> validate(const Split& examples) {
  std::vector<std::string> out;
  std::optional<bool> binary;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const std::string where = "example " + std::to_string(i);
    validate_example(examples[i], where, out);
    for (const auto& t : examples[i].targets) {
      if (!binary) binary = t.is_binary();
      if (*binary != t.is_binary()) {
        out.push_back(where + ": mixes unary and binary-span targets");
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> validate(const TaskDataset& dataset) {
  std::vector<std::string> out;
  const std::pair<const char*, const Split*> splits[] = {
      {"train", &dataset.train}, {"dev", &dataset.dev}, {"test", &dataset.test}};
  for (const auto& [name, split] : splits) {
    for (auto& v : validate(*split)) out.push_back(std::string(name) + " " + v);
  }
  if (!(LabelVocabulary::from_split(dataset.train) == dataset.vocab)) {
    out.push_back("vocabulary does not match the train split labels");
  }
  for (const auto& l : dataset.unseen_labels()) {
    out.push_back("label '" + l + "' appears in dev/test but not in train");
  }
  return out;
}

json to_json(const EdgeExample& example) {
  json targets = json::array();
  for (const auto& t : example.targets) {
    json jt = json::object();
    jt["span1"] = {t.span1.start, t.span1.end};
    if (t.span2) jt["span2"] = {t.span2->start, t.span2->end};
    jt["labels"] = t.labels;
    targets.push_back(std::move(jt));
  }
  json out = json::object();
  out["text"] = example.text;
  out["tokens"] = example.tokens;
  out["targets"] = std::move(targets);
  out["info"] = example.info;
  return out;
}

namespace {

Span span_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw FormatError("span must be a 2-element array of nonnegative integers");
  }
  return Span{j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
}

}  // namespace

EdgeExample example_from_json(const json& object) {
  if (!object.is_object()) throw FormatError("record is not a JSON object");
  if (auto v = object.find("version"); v != object.end() && *v != 1) {
    throw FormatError("unsupported version " + v->dump());
  }
  EdgeExample ex;
  if (auto it = object.find("text"); it != object.end()) ex.text = it->get<std::string>();
  ex.tokens = object.at("tokens").get<std::vector<std::string>>();
  if (auto it = object.find("targets"); it != object.end()) {
    for (const auto& jt : *it) {
      Target t;
      t.span1 = span_from_json(jt.at("span1"));
      if (auto s2 = jt.find("span2"); s2 != jt.end() && !s2->is_null()) t.span2 = span_from_json(*s2);
      if (auto lb = jt.find("labels"); lb != jt.end()) {
        t.labels = lb->get<std::vector<std::string>>();
      }
      ex.targets.push_back(std::move(t));
    }
  }
  if (auto it = object.find("info"); it != object.end()) {
    if (!it->is_object()) throw FormatError("\"info\" must be an object");
    ex.info = *it;
  }
  return ex;
}

std::string to_jsonl_line(const EdgeExample& example) {
  return to_json(example).dump(-1, ' ', false, json::error_handler_t::strict);
}

Split read_jsonl(std::istream& in) {
  Split out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    EdgeExample ex;
    try {
      ex = example_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const FormatError& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    std::vector<std::string> problems;
    validate_example(ex, "line " + std::to_string(line_no), problems);
    if (!problems.empty()) throw ValidationError(problems.front());
    out.push_back(std::move(ex));
  }
  return out;
}

Split read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return read_jsonl(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_jsonl(const Split& examples, std::ostream& out) {
  for (const auto& ex : examples) {
    try {
      out << to_jsonl_line(ex) << '\n';
    } catch (const json::exception& e) {
      throw FormatError(std::string("cannot serialize example: ") + e.what());
    }
  }
}

void write_jsonl(const Split& examples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_jsonl(examples, out);
  if (!out) throw Error("write failed: " + path.string());
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

}  // namespace edgeprobe
