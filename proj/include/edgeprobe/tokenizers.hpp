// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace edgeprobe {

// A named, deterministic string -> tokens function.
struct TokenizerAdapter {
  std::string name;
  std::function<std::vector<std::string>(std::string_view)> tokenize;

  std::vector<std::string> operator()(std::string_view text) const { return tokenize(text); }
};

std::vector<std::string> split_whitespace(std::string_view text);

// Splits on whitespace only.
TokenizerAdapter whitespace_adapter();

// Rule-based splitting in the style of the Moses English tokenizer:
// punctuation is split from words, "X'Y" clitics become "X" + "'Y", and
// the characters & | < > ' " [ ] are escaped as XML entities.
TokenizerAdapter moses_like_adapter();
std::vector<std::string> moses_like_tokenize(std::string_view text);
// The same splitting rules without entity escaping.
std::vector<std::string> split_punctuation(std::string_view text);

// Greedy longest-match subword splitting over a piece vocabulary. Word
// continuations carry the "##" prefix; words that cannot be covered
// become "[UNK]". Punctuation is split from words first.
class WordPieceVocabulary {
 public:
  explicit WordPieceVocabulary(std::set<std::string> pieces) : pieces_(std::move(pieces)) {}
  // One piece per line.
  static WordPieceVocabulary load(const std::filesystem::path& path);

  bool contains(std::string_view piece) const { return pieces_.count(std::string(piece)) != 0; }
  std::vector<std::string> tokenize(std::string_view text, bool lowercase) const;

 private:
  std::set<std::string> pieces_;
};

TokenizerAdapter wordpiece_adapter(std::shared_ptr<const WordPieceVocabulary> vocab,
                                   bool lowercase);

struct AdapterOptions {
  std::filesystem::path vocab_file;  // wordpiece-file only
  bool lowercase = false;
};

// "whitespace", "moses-like", "wordpiece-file". Throws Error on unknown names.
TokenizerAdapter make_adapter(const std::string& name, const AdapterOptions& options = {});

// Parallel token file: one JSON value per line, either an array of token
// strings or an object with a "tokens" array. Throws FormatError.
std::vector<std::vector<std::string>> read_token_file(std::istream& in);
std::vector<std::vector<std::string>> read_token_file(const std::filesystem::path& path);

}  // namespace edgeprobe
