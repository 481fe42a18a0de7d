// Copyright 2026 The lexattn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.h"
#include "lexattn/errors.h"
#include "lexattn/report.h"
#include "lexattn/util.h"
#include "run_config.h"
#include "testing.h"

namespace lexattn::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lexattn");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t line_count(const fs::path& p) {
  const std::string text = read_file(p);
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST(RunConfigTest, ParseApplyAndSnapshot) {
  RunConfig c;
  apply_config_text(c, "# comment\nvariant = attn_gate\nhidden_dim=12\n\nlr = 0.01\n"
                       "lexicons = a:1:scalar:/x.tsv, b:2:binary:/y.tsv\nlowercase = false\n");
  EXPECT_EQ(c.model.variant, Variant::kAttnGate);
  EXPECT_EQ(c.model.hidden_dim, 12u);
  EXPECT_EQ(c.train.lr, 0.01);
  EXPECT_EQ(c.lexicons.size(), 2u);
  EXPECT_FALSE(c.lowercase);
  RunConfig back;
  apply_config_text(back, format_config(c));
  EXPECT_EQ(format_config(back), format_config(c));
  EXPECT_EQ(get_setting(back, "lexicons"), "a:1:scalar:/x.tsv,b:2:binary:/y.tsv");
}

TEST(RunConfigTest, Errors) {
  RunConfig c;
  EXPECT_THROW(apply_config_text(c, "hiden_dim = 3\n"), ConfigError);
  EXPECT_THROW(apply_config_text(c, "hidden_dim 3\n"), ParseError);
  EXPECT_THROW(apply_config_text(c, "seed = 1\nseed = 2\n"), ParseError);
  EXPECT_THROW(apply_setting(c, "hidden_dim", "-3"), ConfigError);
  EXPECT_THROW(apply_setting(c, "lr", "fast"), ConfigError);
  EXPECT_THROW(apply_setting(c, "lowercase", "maybe"), ConfigError);
  EXPECT_THROW(apply_setting(c, "variant", "film"), ConfigError);
  EXPECT_THROW(apply_setting(c, "seed", "-1"), ConfigError);
  EXPECT_THROW(apply_setting(c, "lexicons", "broken"), ConfigError);
}

TEST(RunConfigTest, KeysCoverEverySetting) {
  for (auto key : config_keys()) {
    RunConfig c;
    EXPECT_NO_THROW(get_setting(c, key)) << key;
  }
  EXPECT_EQ(config_keys().size(), 27u);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = testing::scratch_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    const Result r = run_cli({"synth", "--out", (dir_ / "data").string(), "--train_size", "48",
                              "--val_size", "16", "--test_size", "16", "--signal_train_vocab",
                              "20", "--signal_test_vocab", "20", "--noise_vocab", "15",
                              "--min_len", "4", "--max_len", "6", "--seed", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    write_file_atomic(dir_ / "run.conf",
                      "variant = baseline\nembed_dim = 6\nhidden_dim = 6\nattn_dim = 6\n"
                      "max_epochs = 2\nbatch_size = 16\nseed = 3\n"
                      "train = " + data("train.tsv") + "\nval = " + data("val.tsv") +
                          "\nlexicons = synth:4:scalar:" + data("lexicon.tsv") + "\n");
  }

  std::string data(const std::string& f) const { return (dir_ / "data" / f).string(); }

  Result train(const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"train", "--config", (dir_ / "run.conf").string(),
                                     "--output_dir", (dir_ / out).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return run_cli(args);
  }

  fs::path dir_;
};

TEST_F(CliTest, SynthWritesRequestedLineCounts) {
  EXPECT_EQ(line_count(data("train.tsv")), 48u);
  EXPECT_EQ(line_count(data("val.tsv")), 16u);
  EXPECT_EQ(line_count(data("test.tsv")), 16u);
  EXPECT_EQ(line_count(data("lexicon.tsv")), 40u);
}

TEST_F(CliTest, SynthSameSeedIsByteIdentical) {
  const std::vector<std::string> args = {"--train_size", "48", "--val_size", "16", "--test_size",
                                         "16", "--signal_train_vocab", "20", "--signal_test_vocab",
                                         "20", "--noise_vocab", "15", "--min_len", "4",
                                         "--max_len", "6", "--seed", "5"};
  std::vector<std::string> again = {"synth", "--out", (dir_ / "again").string()};
  again.insert(again.end(), args.begin(), args.end());
  ASSERT_EQ(run_cli(again).code, 0);
  for (const char* f : {"train.tsv", "val.tsv", "test.tsv", "lexicon.tsv"}) {
    EXPECT_EQ(read_file(dir_ / "again" / f), read_file(data(f))) << f;
  }
}

TEST_F(CliTest, SynthRejectsEvenSignalCount) {
  const Result r = run_cli({"synth", "--out", (dir_ / "bad").string(), "--signal_words_per_seq", "2"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("odd"), std::string::npos) << r.err;
}

TEST_F(CliTest, TrainWritesRunDirectory) {
  const Result r = train("run");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"checkpoint", "history.tsv", "config.resolved", "labels.tsv", "vocab.txt",
                        "lexicon.table"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  EXPECT_EQ(line_count(dir_ / "run" / "history.tsv"), 3u);
}

TEST_F(CliTest, FlagOverridesConfigFile) {
  ASSERT_EQ(train("run", {"--variant", "attn_gate"}).code, 0);
  const std::string resolved = read_file(dir_ / "run" / "config.resolved");
  EXPECT_NE(resolved.find("variant = attn_gate\n"), std::string::npos) << resolved;
  EXPECT_NE(resolved.find("hidden_dim = 6\n"), std::string::npos);
}

TEST_F(CliTest, ResolvedConfigReproducesTheRun) {
  ASSERT_EQ(train("run").code, 0);
  const Result r = run_cli({"train", "--config", (dir_ / "run" / "config.resolved").string(),
                            "--output_dir", (dir_ / "rerun").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir_ / "rerun" / "checkpoint"), read_file(dir_ / "run" / "checkpoint"));
  EXPECT_EQ(read_file(dir_ / "rerun" / "history.tsv"), read_file(dir_ / "run" / "history.tsv"));
}

TEST_F(CliTest, MissingTrainFileNamesThePath) {
  const Result r = train("run", {"--train", (dir_ / "nowhere.tsv").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("nowhere.tsv"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir_ / "run"));
}

TEST_F(CliTest, UnknownKeyIsRejected) {
  write_file_atomic(dir_ / "typo.conf", "hiden_dim = 4\n");
  const Result r = run_cli({"train", "--config", (dir_ / "typo.conf").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("hiden_dim"), std::string::npos);
  EXPECT_EQ(run_cli({"train", "--hiden_dim", "4"}).code, kExitUsage);
}

TEST_F(CliTest, FailedRunRemovesPartialOutputs) {
  write_file_atomic(dir_ / "vectors.txt", "noise00001 1 2\n");
  const Result r = train("run", {"--embeddings", (dir_ / "vectors.txt").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(fs::exists(dir_ / "run")) << r.err;
}

TEST_F(CliTest, MultiSeedSummary) {
  const Result r = train("multi", {"--seeds", "2", "--test", data("test.tsv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "multi" / "seed_3" / "checkpoint"));
  EXPECT_TRUE(fs::exists(dir_ / "multi" / "seed_4" / "test_metrics.tsv"));
  const std::string summary = read_file(dir_ / "multi" / "summary.tsv");
  EXPECT_EQ(summary.rfind("seed\ttest_macro_f1\n3\t", 0), 0u) << summary;
  EXPECT_NE(summary.find("\nmean\t"), std::string::npos);
  // Seed directories evaluate through the shared parent files.
  EXPECT_EQ(run_cli({"eval", "--checkpoint", (dir_ / "multi" / "seed_4" / "checkpoint").string(),
                     "--data", data("test.tsv"), "--out", (dir_ / "m.tsv").string()})
                .code,
            0);
}

TEST_F(CliTest, EvalIsDeterministicAndFormatted) {
  ASSERT_EQ(train("run").code, 0);
  const std::string ckpt = (dir_ / "run" / "checkpoint").string();
  const Result a = run_cli({"eval", "--checkpoint", ckpt, "--data", data("test.tsv"), "--out",
                            (dir_ / "a.tsv").string()});
  const Result b = run_cli({"eval", "--checkpoint", ckpt, "--data", data("test.tsv"), "--out",
                            (dir_ / "b.tsv").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(read_file(dir_ / "a.tsv"), read_file(dir_ / "b.tsv"));
  EXPECT_EQ(a.out, read_file(dir_ / "a.tsv"));
  const std::string text = read_file(dir_ / "a.tsv");
  const auto lines = split(text, '\n');
  EXPECT_EQ(lines[0].substr(0, 9), "accuracy\t");
  EXPECT_EQ(lines[1].substr(0, 9), "macro_f1\t");
}

TEST_F(CliTest, EvalErrors) {
  ASSERT_EQ(train("run").code, 0);
  const std::string ckpt = (dir_ / "run" / "checkpoint").string();
  write_file_atomic(dir_ / "empty.tsv", "");
  EXPECT_EQ(run_cli({"eval", "--checkpoint", ckpt, "--data", (dir_ / "empty.tsv").string(),
                     "--out", (dir_ / "m.tsv").string()})
                .code,
            kExitUsage);
  write_file_atomic(dir_ / "odd.tsv", "positive\tnoise00001\nsarcastic\tnoise00002\n");
  const Result r = run_cli({"eval", "--checkpoint", ckpt, "--data", (dir_ / "odd.tsv").string(),
                            "--out", (dir_ / "m.tsv").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("sarcastic"), std::string::npos) << r.err;
  EXPECT_EQ(run_cli({"eval", "--checkpoint", (dir_ / "none").string(), "--data", data("test.tsv"),
                     "--out", (dir_ / "m.tsv").string()})
                .code,
            kExitUsage);
  EXPECT_EQ(run_cli({"eval"}).code, kExitUsage);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
}

TEST_F(CliTest, AttendJsonAndSvgAgree) {
  ASSERT_EQ(train("run", {"--variant", "attn_gate"}).code, 0);
  const std::string ckpt = (dir_ / "run" / "checkpoint").string();
  ASSERT_EQ(run_cli({"attend", "--checkpoint", ckpt, "--data", data("test.tsv"), "--format",
                     "json", "--out", (dir_ / "a.json").string()})
                .code,
            0);
  ASSERT_EQ(run_cli({"attend", "--checkpoint", ckpt, "--data", data("test.tsv"), "--format", "svg",
                     "--out", (dir_ / "a.svg").string()})
                .code,
            0);
  const auto reports = parse_attention_json(read_file(dir_ / "a.json"));
  ASSERT_EQ(reports.size(), 16u);
  EXPECT_EQ(attention_svg(reports), read_file(dir_ / "a.svg"));
  for (const auto& r : reports) EXPECT_EQ(r.variant, "attn_gate");
}

TEST_F(CliTest, AttendSampleIsSeeded) {
  ASSERT_EQ(train("run").code, 0);
  const std::string ckpt = (dir_ / "run" / "checkpoint").string();
  auto sample = [&](const std::string& name, const std::string& seed) {
    const Result r = run_cli({"attend", "--checkpoint", ckpt, "--data", data("test.tsv"),
                              "--sample", "5", "--seed", seed, "--out", (dir_ / name).string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return parse_attention_json(read_file(dir_ / name));
  };
  const auto a = sample("a.json", "7");
  EXPECT_EQ(a.size(), 5u);
  EXPECT_EQ(sample("b.json", "7"), a);
  EXPECT_NE(sample("c.json", "8"), a);
}

TEST_F(CliTest, SingleTokenExampleGetsFullWeight) {
  ASSERT_EQ(train("run").code, 0);
  write_file_atomic(dir_ / "one.tsv", "positive\tnoise00003\n");
  ASSERT_EQ(run_cli({"attend", "--checkpoint", (dir_ / "run" / "checkpoint").string(), "--data",
                     (dir_ / "one.tsv").string(), "--out", (dir_ / "one.json").string()})
                .code,
            0);
  const auto r = parse_attention_json(read_file(dir_ / "one.json"));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].weights, std::vector<double>{1.0});
}

TEST_F(CliTest, LexiconCompile) {
  const std::string lex = std::string(LEXATTN_TEST_DATA) + "/lexicons/";
  const Result r = run_cli({"lexicon-compile", "--lexicon", "mpqa:4:multihot:" + lex + "mpqa_like.tsv",
                            "--lexicon", "afinn:1:scalar:" + lex + "afinn_like.tsv", "--out",
                            (dir_ / "t.table").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("total_dims 5"), std::string::npos) << r.out;
  EXPECT_EQ(load_feature_table(dir_ / "t.table").total_dims(), 5u);
  EXPECT_EQ(run_cli({"lexicon-compile", "--lexicon", "x:1:scalar:" + (dir_ / "no.tsv").string(),
                     "--out", (dir_ / "u.table").string()})
                .code,
            kExitUsage);
}

TEST(CliHelpTest, HelpExitsZero) {
  const Result r = run_cli({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("train"), std::string::npos);
}

}  // namespace
}  // namespace lexattn::cli
