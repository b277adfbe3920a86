// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include "edgeprobe/tokenizers.hpp"

#include <fstream>

#include "edgeprobe/error.hpp"
#include "json.hpp"

namespace edgeprobe {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Non-ASCII bytes count as word characters so UTF-8 sequences never split.
bool is_word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

bool is_alpha(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string escape_moses(const std::string& token) {
  std::string out;
  for (char c : token) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '|': out += "&#124;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\'': out += "&apos;"; break;
      case '"': out += "&quot;"; break;
      case '[': out += "&#91;"; break;
      case ']': out += "&#93;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void moses_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  const std::size_t n = chunk.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char c = chunk[i];
    const char prev = i > 0 ? chunk[i - 1] : '\0';
    const char next = i + 1 < n ? chunk[i + 1] : '\0';
    if (is_word_byte(c)) {
      cur.push_back(c);
    } else if (c == '\'') {
      if ((is_alpha(prev) && is_alpha(next)) || (is_digit(prev) && next == 's')) {
        flush();
        cur.push_back(c);
      } else {
        flush();
        out.emplace_back(1, c);
      }
    } else if (c == '.') {
      const bool inner = !cur.empty() && is_word_byte(next);
      const bool abbreviation = !cur.empty() && next == '\0' && cur.find('.') != std::string::npos;
      if (inner || abbreviation) {
        cur.push_back(c);
      } else {
        flush();
        out.emplace_back(1, c);
      }
    } else if (c == ',' && is_digit(prev) && is_digit(next)) {
      cur.push_back(c);
    } else if (c == '-' && is_word_byte(prev) && is_word_byte(next)) {
      cur.push_back(c);
    } else {
      flush();
      out.emplace_back(1, c);
    }
  }
  flush();
}

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && !is_word_byte(c) && !is_space(c);
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

TokenizerAdapter whitespace_adapter() {
  return {"whitespace", [](std::string_view text) { return split_whitespace(text); }};
}

std::vector<std::string> split_punctuation(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& chunk : split_whitespace(text)) moses_chunk(chunk, out);
  return out;
}

std::vector<std::string> moses_like_tokenize(std::string_view text) {
  const std::vector<std::string> raw = split_punctuation(text);
  std::vector<std::string> out;
  out.reserve(raw.size());
  for (const auto& t : raw) out.push_back(escape_moses(t));
  return out;
}

TokenizerAdapter moses_like_adapter() {
  return {"moses-like", [](std::string_view text) { return moses_like_tokenize(text); }};
}

WordPieceVocabulary WordPieceVocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vocabulary file " + path.string());
  std::set<std::string> pieces;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) pieces.insert(line);
  }
  return WordPieceVocabulary(std::move(pieces));
}

std::vector<std::string> WordPieceVocabulary::tokenize(std::string_view text,
                                                       bool lowercase) const {
  std::string normalized(text);
  if (lowercase) {
    for (char& c : normalized) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
  }
  std::vector<std::string> words;
  for (const auto& chunk : split_whitespace(normalized)) {
    std::string cur;
    for (char c : chunk) {
      if (is_punct(c)) {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
        words.emplace_back(1, c);
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) words.push_back(std::move(cur));
  }

  std::vector<std::string> out;
  for (const auto& word : words) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    bool bad = false;
    while (start < word.size()) {
      std::size_t end = word.size();
      std::string match;
      while (end > start) {
        // only cut at UTF-8 character boundaries
        if (end < word.size() && (static_cast<unsigned char>(word[end]) & 0xC0) == 0x80) {
          --end;
          continue;
        }
        std::string piece = word.substr(start, end - start);
        if (start > 0) piece = "##" + piece;
        if (contains(piece)) {
          match = std::move(piece);
          break;
        }
        --end;
      }
      if (match.empty()) {
        bad = true;
        break;
      }
      pieces.push_back(std::move(match));
      start = end;
    }
    if (bad) {
      out.emplace_back("[UNK]");
    } else {
      out.insert(out.end(), pieces.begin(), pieces.end());
    }
  }
  return out;
}

TokenizerAdapter wordpiece_adapter(std::shared_ptr<const WordPieceVocabulary> vocab,
                                   bool lowercase) {
  return {"wordpiece-file", [vocab = std::move(vocab), lowercase](std::string_view text) {
            return vocab->tokenize(text, lowercase);
          }};
}

TokenizerAdapter make_adapter(const std::string& name, const AdapterOptions& options) {
  if (name == "whitespace") return whitespace_adapter();
  if (name == "moses-like") return moses_like_adapter();
  if (name == "wordpiece-file") {
    if (options.vocab_file.empty()) throw Error("wordpiece-file adapter needs a vocabulary file");
    auto vocab = std::make_shared<const WordPieceVocabulary>(
        WordPieceVocabulary::load(options.vocab_file));
    return wordpiece_adapter(std::move(vocab), options.lowercase);
  }
  throw Error("unknown tokenizer adapter '" + name + "'");
}

std::vector<std::vector<std::string>> read_token_file(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back((j.is_object() ? j.at("tokens") : j).get<std::vector<std::string>>());
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::vector<std::string>> read_token_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_token_file(in);
}

}  // namespace edgeprobe
