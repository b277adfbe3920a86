// Copyright 2026 The edgeprobe Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "acceptance/synthetic.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace edgeprobe {
namespace {

using testing::read_file;
using testing::TempDir;
using testing::write_file;

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::filesystem::path& stdout_file) {
  const std::string cmd = std::string("\"") + EDGEPROBE_CLI_PATH + "\" " + args + " > \"" +
                          stdout_file.string() + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(stdout_file);
  return r;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

TEST(Cli, ConvertPrintsStats) {
  TempDir dir("cli");
  write_file(dir / "in.tsv", "s1\tBarack Obama visited Paris\ns1\t0\t2\tPERSON\ns1\t3\t4\tGPE\n");
  const auto r = run("convert --format span-tsv --task ner " + q(dir / "in.tsv") + " " + q(dir / "out.jsonl"),
                     dir / "stdout");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["examples"], 1);
  EXPECT_EQ(j["targets"], 2);
  EXPECT_EQ(j["task"], "ner");
  EXPECT_TRUE(std::filesystem::is_regular_file(dir / "out.jsonl"));
}

TEST(Cli, UsageErrorsExitTwo) {
  TempDir dir("cli");
  EXPECT_EQ(run("convert --format conllu --task dep " + q(dir / "missing") + " " + q(dir / "o"), dir / "s").code, 2);
  EXPECT_EQ(run("nosuchcommand", dir / "s").code, 2);
  EXPECT_EQ(run("", dir / "s").code, 2);
  write_file(dir / "t.txt", "(S (NN x))\n");
  EXPECT_EQ(run("convert --format bracketed --task dep " + q(dir / "t.txt") + " " + q(dir / "o"), dir / "s").code, 2);
}

TEST(Cli, MalformedInputExitsOne) {
  TempDir dir("cli");
  write_file(dir / "bad.conllu", "1\tonly three\t_\n");
  EXPECT_EQ(run("convert --format conllu --task dep " + q(dir / "bad.conllu") + " " + q(dir / "o"), dir / "s").code, 1);
}

TEST(Cli, AlignIdentityIsByteIdentical) {
  TempDir dir("cli");
  const std::string data =
      R"({"text":"the cat sat","tokens":["the","cat","sat"],"targets":[{"span1":[1,2],"labels":["NN"]}],"info":{"id":"x"}})"
      "\n"
      R"({"text":"a b","tokens":["a","b"],"targets":[{"span1":[0,1],"span2":[1,2],"labels":["r"]}],"info":{}})"
      "\n";
  write_file(dir / "in.jsonl", data);
  const auto r = run("align " + q(dir / "in.jsonl") + " " + q(dir / "out.jsonl") + " --adapter whitespace", dir / "s");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_file(dir / "out.jsonl"), data);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["dropped_examples"], 0);
}

TEST(Cli, AlignReportsDrops) {
  TempDir dir("cli");
  write_file(dir / "in.jsonl",
             R"({"text":"ab cd","tokens":["ab","cd"],"targets":[{"span1":[0,1],"labels":["X"]}],"info":{}})"
             "\n"
             R"({"text":"ef","tokens":["ef"],"targets":[{"span1":[0,1],"labels":["Y"]}],"info":{}})"
             "\n");
  // second sentence's token has no characters in common with its new tokenization
  write_file(dir / "tok.txt", "[\"ab\", \"cd\"]\n{\"tokens\": [\"zz\"]}\n");
  const auto r = run("align " + q(dir / "in.jsonl") + " " + q(dir / "out.jsonl") + " --tokens " + q(dir / "tok.txt"),
                     dir / "s");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["examples_in"], 2);
  EXPECT_EQ(j["examples_out"], 1);
  EXPECT_EQ(j["dropped_examples"], 1);
  EXPECT_EQ(run("align " + q(dir / "in.jsonl") + " " + q(dir / "o2") + " --adapter bogus", dir / "s").code, 2);
}

class CliRuns : public ::testing::Test {
 protected:
  void SetUp() override {
    synthetic::Options o;
    o.n_labels = 2;
    o.train_sentences = 120;
    o.dev_sentences = 40;
    const auto task = synthetic::make_pair_task(o);
    write_jsonl(task.train, dir / "train.jsonl");
    write_jsonl(task.dev, dir / "dev.jsonl");
    write_file(dir / "exp.cfg",
               "train=train.jsonl\ndev=dev.jsonl\nembeddings=random:8\nprojection_dim=16\nmlp_hidden_dim=16\n"
               "eval_interval=20\nmax_steps=60\nlr=0.003\nencoder=lexical\nname=lex\n");
  }
  Result train(const std::string& out, const std::string& extra = "") {
    return run("train --config " + q(dir / "exp.cfg") + " --out " + q(dir / out) + " " + extra, dir / "stdout");
  }
  TempDir dir{"cli_runs"};
};

TEST_F(CliRuns, TrainIsDeterministic) {
  const auto a = train("a");
  ASSERT_EQ(a.code, 0);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j["steps"], 60);
  ASSERT_EQ(train("b").code, 0);
  EXPECT_EQ(read_file(dir / "a" / "checkpoint.epp"), read_file(dir / "b" / "checkpoint.epp"));
  EXPECT_EQ(read_file(dir / "a" / "report.json"), read_file(dir / "b" / "report.json"));
  EXPECT_EQ(read_file(dir / "a" / "train_log.jsonl"), read_file(dir / "b" / "train_log.jsonl"));
  // existing run directory
  EXPECT_EQ(train("a").code, 2);
  EXPECT_EQ(train("c", "nosuchkey=1").code, 2);
  ASSERT_EQ(train("d", "seed=5").code, 0);
  EXPECT_NE(read_file(dir / "a" / "checkpoint.epp"), read_file(dir / "d" / "checkpoint.epp"));
}

TEST_F(CliRuns, EvalAndReport) {
  ASSERT_EQ(train("base").code, 0);
  ASSERT_EQ(train("cnn", "encoder=cnn1 name=cnn1").code, 0);
  const auto e = run("eval --run " + q(dir / "base") + " --by-label --by-distance 3", dir / "stdout");
  ASSERT_EQ(e.code, 0);
  const auto j = nlohmann::json::parse(e.out);
  const auto stored = nlohmann::json::parse(read_file(dir / "base" / "report.json"));
  EXPECT_EQ(j["micro_f1"], stored["micro_f1"]);
  EXPECT_EQ(j["distance"].size(), 5u);

  const auto csv = run("eval --run " + q(dir / "base") + " --by-distance 3 --csv", dir / "stdout");
  ASSERT_EQ(csv.code, 0);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 1 + 5);
  EXPECT_EQ(run("eval --run " + q(dir / "base") + " --csv", dir / "stdout").code, 2);
  EXPECT_EQ(run("eval --run " + q(dir / "nope"), dir / "stdout").code, 2);

  const auto rep = run("report " + q(dir / "base") + " " + q(dir / "cnn") + " --baseline lex --csv", dir / "stdout");
  ASSERT_EQ(rep.code, 0);
  EXPECT_EQ(std::count(rep.out.begin(), rep.out.end(), '\n'), 3);
  EXPECT_NE(rep.out.find("\ncnn1,1,"), std::string::npos);
}

}  // namespace
}  // namespace edgeprobe
