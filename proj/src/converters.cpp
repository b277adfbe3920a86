// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/converters.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "edgeprobe/error.hpp"
#include "edgeprobe/tokenizers.hpp"

namespace edgeprobe {
namespace {

std::vector<std::string> split_on(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<std::uint32_t> parse_index(std::string_view s) {
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return in;
}

void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

// ---- CoNLL-U ---------------------------------------------------------------

namespace {

struct ConlluToken {
  std::string form;
  std::uint32_t head = 0;
  std::string deprel;
  std::size_t line_no = 0;
};

void finish_conllu_sentence(std::vector<ConlluToken>& tokens, std::string& text,
                            std::string& sent_id, const ConlluOptions& options, Split& out) {
  if (tokens.empty()) {
    text.clear();
    sent_id.clear();
    return;
  }
  const std::size_t n = tokens.size();
  for (const auto& t : tokens) {
    if (t.head > n) {
      throw ValidationError(at_line(t.line_no) + "head " + std::to_string(t.head) + " out of range");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t cur = i + 1;
    for (std::size_t steps = 0; cur != 0; ++steps) {
      if (steps > n) throw ValidationError(at_line(tokens[i].line_no) + "cyclic head chain");
      cur = tokens[cur - 1].head;
    }
  }
  EdgeExample ex;
  for (const auto& t : tokens) ex.tokens.push_back(t.form);
  ex.text = text.empty() ? join_tokens(ex.tokens) : text;
  ex.info = {{"source", "conllu"}};
  if (!sent_id.empty()) ex.info["sent_id"] = sent_id;
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& t = tokens[i];
    Target target;
    target.span1 = Span{i, i + 1};
    if (t.head == 0) {
      if (!options.keep_root) continue;
      target.span2 = target.span1;
      target.labels = {"root"};
    } else {
      target.span2 = Span{t.head - 1, t.head};
      target.labels = {t.deprel};
    }
    ex.targets.push_back(std::move(target));
  }
  out.push_back(std::move(ex));
  tokens.clear();
  text.clear();
  sent_id.clear();
}

}  // namespace

Split from_conllu(std::istream& in, const ConlluOptions& options) {
  Split out;
  std::vector<ConlluToken> tokens;
  std::string text, sent_id, line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.find_first_not_of(" \t") == std::string::npos) {
      finish_conllu_sentence(tokens, text, sent_id, options, out);
      continue;
    }
    if (line[0] == '#') {
      if (line.rfind("# text = ", 0) == 0) text = line.substr(9);
      if (line.rfind("# sent_id = ", 0) == 0) sent_id = line.substr(12);
      continue;
    }
    const auto fields = split_on(line, '\t');
    if (fields.size() != 10) {
      throw FormatError(at_line(line_no) + "expected 10 tab-separated columns, got " +
                        std::to_string(fields.size()));
    }
    if (fields[0].find_first_of("-.") != std::string::npos) continue;  // multiword / empty node
    const auto id = parse_index(fields[0]);
    if (!id || *id != tokens.size() + 1) throw FormatError(at_line(line_no) + "bad token id '" + fields[0] + "'");
    const auto head = parse_index(fields[6]);
    if (!head) throw FormatError(at_line(line_no) + "bad head '" + fields[6] + "'");
    if (fields[1].empty() || fields[7].empty() || fields[7] == "_") {
      throw FormatError(at_line(line_no) + "missing form or deprel");
    }
    tokens.push_back({fields[1], *head, fields[7], line_no});
  }
  finish_conllu_sentence(tokens, text, sent_id, options, out);
  return out;
}

Split from_conllu(const std::filesystem::path& path, const ConlluOptions& options) {
  auto in = open_input(path);
  return from_conllu(in, options);
}

// ---- Bracketed trees ------------------------------------------------------

namespace {

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  std::vector<ParseTree> parse_all() {
    std::vector<ParseTree> out;
    skip_space();
    while (pos_ < text_.size()) {
      if (text_[pos_] != '(') throw FormatError("expected '(' at byte " + std::to_string(pos_));
      out.push_back(parse_node());
      skip_space();
    }
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string read_atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  ParseTree parse_node() {
    ++pos_;  // '('
    ParseTree node;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') node.label = read_atom();
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) throw FormatError("unbalanced brackets: missing ')'");
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] == '(') {
        node.children.push_back(parse_node());
      } else {
        ParseTree leaf;
        leaf.word = read_atom();
        node.children.push_back(std::move(leaf));
      }
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Drops -NONE- subtrees and nodes left empty; false if `node` itself vanishes.
bool prune_empty(ParseTree& node) {
  if (node.is_leaf()) return true;
  if (node.label == "-NONE-") return false;
  std::vector<ParseTree> kept;
  for (auto& c : node.children) {
    if (prune_empty(c)) kept.push_back(std::move(c));
  }
  node.children = std::move(kept);
  return !node.children.empty();
}

bool is_root_label(const std::string& label) { return label.empty() || label == "TOP" || label == "ROOT"; }

std::uint32_t collect(const ParseTree& node, std::uint32_t start, EdgeExample& pos, EdgeExample& constit) {
  if (node.is_preterminal()) {
    pos.tokens.push_back(node.children[0].word);
    pos.targets.push_back({Span{start, start + 1}, std::nullopt, {node.label}});
    return start + 1;
  }
  if (node.is_leaf()) {
    throw FormatError("bare word '" + node.word + "' outside a preterminal");
  }
  std::size_t slot = constit.targets.size();
  const bool labeled = !is_root_label(node.label);
  if (labeled) constit.targets.push_back({Span{start, start}, std::nullopt, {strip_function_tags(node.label)}});
  std::uint32_t end = start;
  for (const auto& child : node.children) end = collect(child, end, pos, constit);
  if (labeled) constit.targets[slot].span1.end = end;
  return end;
}

}  // namespace

std::vector<ParseTree> parse_bracketed(std::string_view text) {
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) throw FormatError("unbalanced brackets: unexpected ')'");
  }
  if (depth != 0) throw FormatError("unbalanced brackets: missing ')'");
  return TreeParser(text).parse_all();
}

std::string strip_function_tags(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  const std::size_t cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

BracketedDatasets from_bracketed(std::string_view text) {
  BracketedDatasets out;
  std::size_t index = 0;
  for (auto& tree : parse_bracketed(text)) {
    const std::size_t tree_index = index++;
    if (!prune_empty(tree)) continue;
    EdgeExample pos, constit;
    collect(tree, 0, pos, constit);
    pos.text = join_tokens(pos.tokens);
    pos.info = {{"source", "bracketed"}, {"tree_index", tree_index}};
    constit.tokens = pos.tokens;
    constit.text = pos.text;
    constit.info = pos.info;
    // unary wrappers have no token-level targets of their own
    std::erase_if(constit.targets, [](const Target& t) { return t.span1.start >= t.span1.end; });
    out.pos.push_back(std::move(pos));
    out.constituents.push_back(std::move(constit));
  }
  return out;
}

BracketedDatasets from_bracketed(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  return from_bracketed(std::string_view(text));
}

// ---- Coreference ------------------------------------------------------------

std::vector<Target> coref_pairs(const MentionCluster& clusters, const CorefScope& scope) {
  std::map<Span, std::size_t> cluster_of;
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    for (const Span& s : clusters.clusters[c]) cluster_of.emplace(s, c);
  }
  std::map<Span, std::uint32_t> sentence;
  for (const auto& [s, idx] : scope.sentence_of) sentence.emplace(s, idx);
  auto sentence_index = [&](const Span& s) -> std::uint32_t {
    auto it = sentence.find(s);
    return it == sentence.end() ? 0 : it->second;
  };

  std::vector<Target> out;
  for (auto a = cluster_of.begin(); a != cluster_of.end(); ++a) {
    for (auto b = std::next(a); b != cluster_of.end(); ++b) {
      if (scope.max_sentence_distance) {
        const std::uint32_t sa = sentence_index(a->first);
        const std::uint32_t sb = sentence_index(b->first);
        if ((sa > sb ? sa - sb : sb - sa) > *scope.max_sentence_distance) continue;
      }
      out.push_back({a->first, b->first, {a->second == b->second ? "1" : "0"}});
    }
  }
  return out;
}

Split from_cluster_json(std::istream& in, std::optional<std::uint32_t> max_sentence_distance) {
  Split out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      const auto sentences = doc.at("sentences").get<std::vector<std::vector<std::string>>>();
      EdgeExample ex;
      std::vector<std::uint32_t> offsets;
      for (const auto& s : sentences) {
        offsets.push_back(static_cast<std::uint32_t>(ex.tokens.size()));
        ex.tokens.insert(ex.tokens.end(), s.begin(), s.end());
      }
      MentionCluster mc;
      mc.document_id = doc.value("doc_id", std::string());
      CorefScope scope;
      scope.max_sentence_distance = max_sentence_distance;
      for (const auto& cluster : doc.at("clusters")) {
        std::vector<Span> spans;
        for (const auto& m : cluster) {
          const auto sent = m.at(0).get<std::uint32_t>();
          const auto start = m.at(1).get<std::uint32_t>();
          const auto end = m.at(2).get<std::uint32_t>();
          if (sent >= sentences.size() || start >= end || end > sentences[sent].size()) {
            throw ValidationError(at_line(line_no) + "mention outside its sentence");
          }
          const Span span{offsets[sent] + start, offsets[sent] + end};
          spans.push_back(span);
          scope.sentence_of.emplace_back(span, sent);
        }
        mc.clusters.push_back(std::move(spans));
      }
      ex.text = join_tokens(ex.tokens);
      ex.targets = coref_pairs(mc, scope);
      ex.info = {{"source", "cluster-json"}, {"doc_id", mc.document_id}};
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(at_line(line_no) + e.what());
    }
  }
  return out;
}

Split from_cluster_json(const std::filesystem::path& path,
                        std::optional<std::uint32_t> max_sentence_distance) {
  auto in = open_input(path);
  return from_cluster_json(in, max_sentence_distance);
}

// ---- Span TSV ---------------------------------------------------------------

Split from_span_tsv(std::istream& in, bool binary) {
  Split out;
  std::map<std::string, std::size_t> by_id;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t target_cols = binary ? 6 : 4;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() == 2) {
      EdgeExample ex;
      ex.tokens = split_whitespace(fields[1]);
      ex.text = join_tokens(ex.tokens);
      ex.info = {{"source", "span-tsv"}, {"id", fields[0]}};
      if (!by_id.emplace(fields[0], out.size()).second) {
        throw FormatError(at_line(line_no) + "duplicate sentence id '" + fields[0] + "'");
      }
      out.push_back(std::move(ex));
      continue;
    }
    if (fields.size() != target_cols) {
      throw FormatError(at_line(line_no) + "expected 2 or " + std::to_string(target_cols) +
                        " columns, got " + std::to_string(fields.size()));
    }
    auto it = by_id.find(fields[0]);
    if (it == by_id.end()) throw FormatError(at_line(line_no) + "unknown sentence id '" + fields[0] + "'");
    std::vector<std::uint32_t> nums;
    for (std::size_t c = 1; c + 1 < fields.size(); ++c) {
      auto v = parse_index(fields[c]);
      if (!v) throw FormatError(at_line(line_no) + "bad span offset '" + fields[c] + "'");
      nums.push_back(*v);
    }
    Target t;
    t.span1 = Span{nums[0], nums[1]};
    if (binary) t.span2 = Span{nums[2], nums[3]};
    if (!fields.back().empty()) t.labels = split_on(fields.back(), '|');
    out[it->second].targets.push_back(std::move(t));
  }
  if (auto problems = validate(out); !problems.empty()) throw ValidationError(problems.front());
  return out;
}

Split from_span_tsv(const std::filesystem::path& path, bool binary) {
  auto in = open_input(path);
  return from_span_tsv(in, binary);
}

// ---- Relation TSV -------------------------------------------------------------

Split from_relation_tsv(std::istream& in) {
  Split out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    chomp(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_on(line, '\t');
    if (fields.size() != 3) {
      throw FormatError(at_line(line_no) + "expected 3 columns, got " + std::to_string(fields.size()));
    }
    std::string sentence = fields[1];
    if (sentence.size() >= 2 && sentence.front() == '"' && sentence.back() == '"') {
      sentence = sentence.substr(1, sentence.size() - 2);
    }
    EdgeExample ex;
    std::optional<std::uint32_t> open[2], close[2];
    std::size_t pos = 0;
    while (pos < sentence.size()) {
      const std::size_t tag = sentence.find('<', pos);
      const std::string_view chunk = std::string_view(sentence).substr(pos, tag == std::string::npos ? std::string::npos : tag - pos);
      for (auto& t : split_punctuation(chunk)) ex.tokens.push_back(std::move(t));
      if (tag == std::string::npos) break;
      static const char* kMarkers[4] = {"<e1>", "</e1>", "<e2>", "</e2>"};
      bool matched = false;
      for (int m = 0; m < 4; ++m) {
        const std::string_view marker = kMarkers[m];
        if (sentence.compare(tag, marker.size(), marker) == 0) {
          auto& slot = (m % 2 == 0 ? open : close)[m / 2];
          if (slot) throw FormatError(at_line(line_no) + "repeated marker " + std::string(marker));
          slot = static_cast<std::uint32_t>(ex.tokens.size());
          pos = tag + marker.size();
          matched = true;
          break;
        }
      }
      if (!matched) {
        // a literal '<' in the text
        const std::size_t next = sentence.find('<', tag + 1);
        for (auto& t : split_punctuation(std::string_view(sentence).substr(tag, next == std::string::npos ? std::string::npos : next - tag))) {
          ex.tokens.push_back(std::move(t));
        }
        pos = next == std::string::npos ? sentence.size() : next;
      }
    }
    for (int e = 0; e < 2; ++e) {
      if (!open[e] || !close[e] || *open[e] >= *close[e]) {
        throw FormatError(at_line(line_no) + "missing or empty entity marker e" + std::to_string(e + 1));
      }
    }
    ex.text = join_tokens(ex.tokens);
    ex.info = {{"source", "relation-tsv"}, {"id", fields[0]}};
    ex.targets.push_back({Span{*open[0], *close[0]}, Span{*open[1], *close[1]}, {fields[2]}});
    out.push_back(std::move(ex));
  }
  return out;
}

Split from_relation_tsv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return from_relation_tsv(in);
}

// ---- Stats --------------------------------------------------------------------

DatasetStats dataset_stats(const Split& split) {
  DatasetStats s;
  std::set<std::string> labels;
  for (const auto& ex : split) {
    ++s.examples;
    s.tokens += ex.tokens.size();
    s.targets += ex.targets.size();
    for (const auto& t : ex.targets) labels.insert(t.labels.begin(), t.labels.end());
  }
  s.labels = labels.size();
  return s;
}

nlohmann::ordered_json to_json(const DatasetStats& stats) {
  nlohmann::ordered_json j;
  j["examples"] = stats.examples;
  j["tokens"] = stats.tokens;
  j["targets"] = stats.targets;
  j["labels"] = stats.labels;
  return j;
}

}  // namespace edgeprobe
