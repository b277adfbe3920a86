// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "edgeprobe/error.hpp"
#include "edgeprobe/tokenizers.hpp"
#include "test_support.hpp"

namespace edgeprobe {
namespace {

using Tokens = std::vector<std::string>;

TEST(Whitespace, SplitsOnRuns) {
  EXPECT_EQ(split_whitespace("  a\tb  c\n"), (Tokens{"a", "b", "c"}));
  EXPECT_TRUE(split_whitespace("   ").empty());
}

TEST(MosesLike, NativeSentence) {
  EXPECT_EQ(moses_like_tokenize("I do n't like pineapples ."),
            (Tokens{"I", "do", "n", "&apos;t", "like", "pineapples", "."}));
}

TEST(MosesLike, Punctuation) {
  EXPECT_EQ(moses_like_tokenize("Hello, world!"), (Tokens{"Hello", ",", "world", "!"}));
  EXPECT_EQ(moses_like_tokenize("(a) & b"), (Tokens{"(", "a", ")", "&amp;", "b"}));
  EXPECT_EQ(moses_like_tokenize("1,000.5 well-known"), (Tokens{"1,000.5", "well-known"}));
  EXPECT_EQ(moses_like_tokenize("U.S. end."), (Tokens{"U.S.", "end", "."}));
}

TEST(MosesLike, SplitPunctuationDoesNotEscape) {
  EXPECT_EQ(split_punctuation("don't \"go\""), (Tokens{"don", "'t", "\"", "go", "\""}));
}

TEST(WordPiece, GreedyLongestMatch) {
  const WordPieceVocabulary vocab({"pine", "##apple", "##apples", "##s", "un", "##aff", "##able", "."});
  EXPECT_EQ(vocab.tokenize("pineapples.", false), (Tokens{"pine", "##apples", "."}));
  EXPECT_EQ(vocab.tokenize("unaffable", false), (Tokens{"un", "##aff", "##able"}));
  EXPECT_EQ(vocab.tokenize("xyz", false), (Tokens{"[UNK]"}));
}

TEST(WordPiece, Lowercase) {
  const WordPieceVocabulary vocab({"pine", "##apple"});
  EXPECT_EQ(vocab.tokenize("PineApple", true), (Tokens{"pine", "##apple"}));
  EXPECT_EQ(vocab.tokenize("PineApple", false), (Tokens{"[UNK]"}));
}

TEST(WordPiece, AdapterFromFile) {
  testing::TempDir dir("wp");
  testing::write_file(dir / "vocab.txt", "i\ndo\nn\n'\nt\nlike\npine\n##apples\n.\n");
  const auto adapter = make_adapter("wordpiece-file", {dir / "vocab.txt", true});
  EXPECT_EQ(adapter.tokenize("I do n't like pineapples ."),
            (Tokens{"i", "do", "n", "'", "t", "like", "pine", "##apples", "."}));
}

TEST(Adapters, UnknownNameThrows) { EXPECT_THROW(make_adapter("nope"), Error); }

TEST(Adapters, Deterministic) {
  const auto a = make_adapter("moses-like");
  EXPECT_EQ(a.tokenize("It's 5 o'clock."), a.tokenize("It's 5 o'clock."));
}

TEST(TokenFile, ArraysAndObjects) {
  std::istringstream in("[\"a\",\"b\"]\n{\"tokens\":[\"c\"],\"granularity\":\"subword\"}\n\n");
  EXPECT_EQ(read_token_file(in), (std::vector<Tokens>{{"a", "b"}, {"c"}}));
  std::istringstream bad("[\"a\"]\n{\"x\":1}\n");
  EXPECT_THROW(read_token_file(bad), FormatError);
}

}  // namespace
}  // namespace edgeprobe
