// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "edgeprobe/converters.hpp"
#include "edgeprobe/error.hpp"

namespace edgeprobe {
namespace {

std::string conllu_row(int id, const std::string& form, int head, const std::string& rel) {
  return std::to_string(id) + "\t" + form + "\t_\t_\t_\t_\t" + std::to_string(head) + "\t" + rel + "\t_\t_\n";
}

TEST(Conllu, DependencyTargets) {
  std::istringstream in("# sent_id = s1\n# text = Atmosphere is always fun\n" +
                        conllu_row(1, "Atmosphere", 4, "nsubj") + conllu_row(2, "is", 4, "cop") +
                        conllu_row(3, "always", 4, "advmod") + conllu_row(4, "fun", 0, "root") + "\n");
  const Split s = from_conllu(in);
  ASSERT_EQ(s.size(), 1u);
  const auto& ex = s[0];
  EXPECT_EQ(ex.text, "Atmosphere is always fun");
  EXPECT_EQ(ex.tokens, (std::vector<std::string>{"Atmosphere", "is", "always", "fun"}));
  ASSERT_EQ(ex.targets.size(), 3u);
  EXPECT_EQ(ex.targets[0], (Target{{0, 1}, Span{3, 4}, {"nsubj"}}));
  EXPECT_EQ(ex.targets[2], (Target{{2, 3}, Span{3, 4}, {"advmod"}}));
  EXPECT_EQ(ex.info["sent_id"], "s1");
  EXPECT_EQ(ex.info["source"], "conllu");
}

TEST(Conllu, KeepRootAndSkippedLines) {
  std::istringstream in("1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + conllu_row(1, "do", 0, "root") +
                        conllu_row(2, "n't", 1, "advmod") + "2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n" + "\n" +
                        conllu_row(1, "Go", 0, "root"));
  const Split dropped = from_conllu(in);
  ASSERT_EQ(dropped.size(), 2u);
  EXPECT_EQ(dropped[0].targets.size(), 1u);
  EXPECT_EQ(dropped[0].text, "do n't");
  EXPECT_TRUE(dropped[1].targets.empty());

  std::istringstream again(conllu_row(1, "Go", 0, "root"));
  const Split kept = from_conllu(again, ConlluOptions{true});
  ASSERT_EQ(kept[0].targets.size(), 1u);
  EXPECT_EQ(kept[0].targets[0], (Target{{0, 1}, Span{0, 1}, {"root"}}));
}

TEST(Conllu, Errors) {
  std::istringstream cycle(conllu_row(1, "a", 2, "x") + conllu_row(2, "b", 1, "y"));
  EXPECT_THROW(from_conllu(cycle), ValidationError);
  std::istringstream range(conllu_row(1, "a", 5, "x"));
  EXPECT_THROW(from_conllu(range), ValidationError);
  std::istringstream columns("1\ta\t_\n");
  try {
    from_conllu(columns);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  std::istringstream ids(conllu_row(1, "a", 0, "root") + conllu_row(3, "b", 1, "x"));
  EXPECT_THROW(from_conllu(ids), FormatError);
}

TEST(Bracketed, PosAndConstituents) {
  const auto d = from_bracketed(std::string_view("(TOP (S (NP-SBJ (DT The) (NN cat)) (VP (VBD sat))))"));
  ASSERT_EQ(d.pos.size(), 1u);
  EXPECT_EQ(d.pos[0].tokens, (std::vector<std::string>{"The", "cat", "sat"}));
  ASSERT_EQ(d.pos[0].targets.size(), 3u);
  EXPECT_EQ(d.pos[0].targets[2], (Target{{2, 3}, std::nullopt, {"VBD"}}));
  const auto& c = d.constituents[0].targets;
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (Target{{0, 3}, std::nullopt, {"S"}}));
  EXPECT_EQ(c[1], (Target{{0, 2}, std::nullopt, {"NP"}}));
  EXPECT_EQ(c[2], (Target{{2, 3}, std::nullopt, {"VP"}}));
  EXPECT_EQ(d.pos[0].info["tree_index"], 0);
}

TEST(Bracketed, UnaryChainsKeepBothLabels) {
  const auto d = from_bracketed(std::string_view("(S (NP (NN dogs)))"));
  // S and NP over the same token
  const auto& c = d.constituents[0].targets;
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].span1, c[1].span1);
}

TEST(Bracketed, EmptyElementsRemoved) {
  const auto d = from_bracketed(
      std::string_view("(S (NP-SBJ (-NONE- *T*-1)) (VP (VB go) (NP (-NONE- *)))) (X (Y z))"));
  ASSERT_EQ(d.pos.size(), 2u);
  EXPECT_EQ(d.pos[0].tokens, (std::vector<std::string>{"go"}));
  const auto& c = d.constituents[0].targets;
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].labels[0], "S");
  EXPECT_EQ(c[1].labels[0], "VP");
  EXPECT_EQ(d.pos[1].info["tree_index"], 1);
}

TEST(Bracketed, FunctionTags) {
  EXPECT_EQ(strip_function_tags("NP-SBJ-1"), "NP");
  EXPECT_EQ(strip_function_tags("PP-LOC=2"), "PP");
  EXPECT_EQ(strip_function_tags("-NONE-"), "-NONE-");
  EXPECT_EQ(strip_function_tags("-LRB-"), "-LRB-");
  EXPECT_EQ(strip_function_tags("NN"), "NN");
}

TEST(Bracketed, Unbalanced) {
  EXPECT_THROW(parse_bracketed("(S (NP x)"), FormatError);
  EXPECT_THROW(parse_bracketed("(S x))"), FormatError);
}

TEST(Coref, PairsAndLabels) {
  MentionCluster mc;
  mc.clusters = {{{0, 1}, {5, 6}}, {{2, 4}}};
  const auto t = coref_pairs(mc);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0], (Target{{0, 1}, Span{2, 4}, {"0"}}));
  EXPECT_EQ(t[1], (Target{{0, 1}, Span{5, 6}, {"1"}}));
  EXPECT_EQ(t[2], (Target{{2, 4}, Span{5, 6}, {"0"}}));
}

TEST(Coref, SingleMentionAndSingletons) {
  MentionCluster one;
  one.clusters = {{{3, 4}}};
  EXPECT_TRUE(coref_pairs(one).empty());
  for (std::uint32_t k = 2; k <= 6; ++k) {
    MentionCluster mc;
    for (std::uint32_t i = 0; i < k; ++i) mc.clusters.push_back({{i, i + 1}});
    const auto t = coref_pairs(mc);
    EXPECT_EQ(t.size(), k * (k - 1) / 2);
    for (const auto& x : t) EXPECT_EQ(x.labels, std::vector<std::string>{"0"});
  }
}

TEST(Coref, DuplicateMentionsAndWindow) {
  MentionCluster mc;
  mc.clusters = {{{0, 1}, {0, 1}, {9, 10}}};
  EXPECT_EQ(coref_pairs(mc).size(), 1u);
  CorefScope scope;
  scope.sentence_of = {{{0, 1}, 0}, {{9, 10}, 3}};
  scope.max_sentence_distance = 1;
  EXPECT_TRUE(coref_pairs(mc, scope).empty());
  scope.max_sentence_distance = 3;
  EXPECT_EQ(coref_pairs(mc, scope).size(), 1u);
}

TEST(Coref, ClusterJson) {
  std::istringstream in(
      R"({"doc_id":"d1","sentences":[["John","left","."],["He","smiled","."],["Mary","waved","."]],)"
      R"("clusters":[[[0,0,1],[1,0,1]],[[2,0,1]]]})"
      "\n");
  const Split s = from_cluster_json(in, 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].tokens.size(), 9u);
  EXPECT_EQ(s[0].info["doc_id"], "d1");
  // John-He (sent 0-1), He-Mary (1-2); John-Mary is two sentences apart
  ASSERT_EQ(s[0].targets.size(), 2u);
  EXPECT_EQ(s[0].targets[0], (Target{{0, 1}, Span{3, 4}, {"1"}}));
  EXPECT_EQ(s[0].targets[1], (Target{{3, 4}, Span{6, 7}, {"0"}}));
  std::istringstream again(in.str());
  EXPECT_EQ(from_cluster_json(again, std::nullopt)[0].targets.size(), 3u);
  std::istringstream bad(R"({"sentences":[["a"]],"clusters":[[[0,0,2]]]})");
  EXPECT_THROW(from_cluster_json(bad), ValidationError);
}

TEST(SpanTsv, UnaryAndBinary) {
  std::istringstream unary("# entities\ns1\tBarack Obama visited Paris\ns1\t0\t2\tPERSON\ns1\t3\t4\tGPE|LOC\n");
  const Split u = from_span_tsv(unary, false);
  ASSERT_EQ(u.size(), 1u);
  ASSERT_EQ(u[0].targets.size(), 2u);
  EXPECT_EQ(u[0].targets[1], (Target{{3, 4}, std::nullopt, {"GPE", "LOC"}}));

  std::istringstream binary("a\tthe dog barked\na\t2\t3\t0\t2\tARG0\n");
  const Split b = from_span_tsv(binary, true);
  EXPECT_EQ(b[0].targets[0], (Target{{2, 3}, Span{0, 2}, {"ARG0"}}));
}

TEST(SpanTsv, Errors) {
  std::istringstream unknown("s1\ta b\ns2\t0\t1\tX\n");
  EXPECT_THROW(from_span_tsv(unknown, false), FormatError);
  std::istringstream dup("s1\ta b\ns1\tc d\n");
  EXPECT_THROW(from_span_tsv(dup, false), FormatError);
  std::istringstream range("s1\ta b\ns1\t0\t5\tX\n");
  EXPECT_THROW(from_span_tsv(range, false), ValidationError);
  std::istringstream columns("s1\ta b\ns1\t0\t1\tX\n");
  EXPECT_THROW(from_span_tsv(columns, true), FormatError);
}

TEST(RelationTsv, Markers) {
  std::istringstream in(
      "8001\t\"The <e1>company</e1> fabricates plastic <e2>chairs</e2>.\"\tProduct-Producer(e2,e1)\n");
  const Split s = from_relation_tsv(in);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].tokens, (std::vector<std::string>{"The", "company", "fabricates", "plastic", "chairs", "."}));
  EXPECT_EQ(s[0].targets[0], (Target{{1, 2}, Span{4, 5}, {"Product-Producer(e2,e1)"}}));
}

TEST(RelationTsv, MultiTokenEntityAndErrors) {
  std::istringstream in("1\t<e1>New York</e1> hosts <e2>the big show</e2>\tOther\n");
  const Split s = from_relation_tsv(in);
  EXPECT_EQ(s[0].targets[0], (Target{{0, 2}, Span{3, 6}, {"Other"}}));
  std::istringstream missing("1\t<e1>a</e1> b c\tOther\n");
  EXPECT_THROW(from_relation_tsv(missing), FormatError);
}

TEST(Stats, Counts) {
  std::istringstream in("s1\ta b c\ns1\t0\t1\tX\ns1\t1\t2\tY|X\ns2\td\n");
  const auto stats = dataset_stats(from_span_tsv(in, false));
  EXPECT_EQ(stats, (DatasetStats{2, 4, 2, 2}));
  EXPECT_EQ(to_json(stats).dump(), R"({"examples":2,"tokens":4,"targets":2,"labels":2})");
}

}  // namespace
}  // namespace edgeprobe
