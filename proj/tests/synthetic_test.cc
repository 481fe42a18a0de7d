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

#include "lexattn/synthetic.h"

#include <set>

#include <gtest/gtest.h>

#include "lexattn/errors.h"
#include "lexattn/lexicon.h"
#include "lexattn/util.h"
#include "testing.h"

namespace lexattn {
namespace {

std::set<std::string> words_of(const std::vector<Example>& examples) {
  std::set<std::string> out;
  for (const auto& e : examples)
    for (const auto& t : tokenize(e.text)) out.insert(t);
  return out;
}

int polarity_sum(const SyntheticCorpus& c, const Example& e) {
  int sum = 0;
  for (const auto& t : tokenize(e.text)) {
    if (auto it = c.polarity.find(t); it != c.polarity.end()) sum += it->second;
  }
  return sum;
}

TEST(SyntheticSpecTest, Invariants) {
  SyntheticSpec s;
  EXPECT_NO_THROW(s.validate());
  s.signal_words_per_seq = 2;
  EXPECT_THROW(s.validate(), ConfigError);
  s.signal_words_per_seq = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SyntheticSpec{};
  s.min_len = 2;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SyntheticSpec{};
  s.min_len = 20;
  s.max_len = 10;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SyntheticSpec{};
  s.lex_dim = 0;
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(SyntheticTest, LabelIsSignOfPolaritySum) {
  SyntheticSpec s;
  s.train_size = 300;
  s.val_size = 50;
  s.test_size = 100;
  const SyntheticCorpus c = generate(s);
  for (const auto* split : {&c.train, &c.val, &c.test}) {
    for (const auto& e : *split) {
      const int sum = polarity_sum(c, e);
      EXPECT_NE(sum, 0);
      EXPECT_EQ(e.label, sum > 0 ? kPositiveLabel : kNegativeLabel);
    }
  }
}

TEST(SyntheticTest, SingleSignalWordSetsLabel) {
  SyntheticSpec s;
  s.signal_words_per_seq = 1;
  s.train_size = 100;
  const SyntheticCorpus c = generate(s);
  for (const auto& e : c.train) {
    std::size_t signals = 0;
    for (const auto& t : tokenize(e.text)) {
      if (c.polarity.count(t)) {
        ++signals;
        EXPECT_EQ(e.label, c.polarity.at(t) > 0 ? kPositiveLabel : kNegativeLabel);
      }
    }
    EXPECT_EQ(signals, 1u);
  }
}

TEST(SyntheticTest, TestSignalWordsNeverSeenInTraining) {
  const SyntheticCorpus c = generate(SyntheticSpec{});
  const auto train_words = words_of(c.train);
  const auto val_words = words_of(c.val);
  for (const auto& w : c.signal_test_words) {
    EXPECT_FALSE(train_words.count(w)) << w;
    EXPECT_FALSE(val_words.count(w)) << w;
  }
  for (const auto& w : words_of(c.test)) {
    EXPECT_TRUE(!c.polarity.count(w) || std::find(c.signal_test_words.begin(), c.signal_test_words.end(), w) != c.signal_test_words.end());
  }
  const std::set<std::string> a(c.signal_train_words.begin(), c.signal_train_words.end());
  for (const auto& w : c.signal_test_words) EXPECT_FALSE(a.count(w));
}

TEST(SyntheticTest, LexiconHasOneNonzeroPolarityDimAndNoNoise) {
  SyntheticSpec s;
  const SyntheticCorpus c = generate(s);
  const auto lex =
      parse_lexicon_text(c.lexicon_tsv, LexiconSpec{"s", s.lex_dim, "", LexiconValueKind::kScalar});
  EXPECT_EQ(lex.entries.size(), s.signal_train_vocab + s.signal_test_vocab);
  for (const auto& [word, values] : lex.entries) {
    int nonzero = 0;
    for (double v : values) {
      if (v != 0.0) {
        ++nonzero;
        EXPECT_EQ(v, c.polarity.at(word));
      }
    }
    EXPECT_EQ(nonzero, 1) << word;
  }
  for (const auto& w : c.noise_words) EXPECT_FALSE(lex.entries.count(w));
}

TEST(SyntheticTest, LabelsBalancedWithinFivePercent) {
  SyntheticSpec s;
  s.train_size = 4000;
  const SyntheticCorpus c = generate(s);
  std::size_t pos = 0;
  for (const auto& e : c.train) pos += e.label == kPositiveLabel;
  EXPECT_NEAR(static_cast<double>(pos) / 4000.0, 0.5, 0.05);
}

TEST(SyntheticTest, LengthsAndSizes) {
  SyntheticSpec s;
  s.min_len = 5;
  s.max_len = 7;
  s.train_size = 123;
  s.val_size = 45;
  s.test_size = 67;
  const SyntheticCorpus c = generate(s);
  EXPECT_EQ(c.train.size(), 123u);
  EXPECT_EQ(c.val.size(), 45u);
  EXPECT_EQ(c.test.size(), 67u);
  for (const auto& e : c.train) {
    const auto n = tokenize(e.text).size();
    EXPECT_GE(n, 5u);
    EXPECT_LE(n, 7u);
  }
}

TEST(SyntheticTest, LexiconOracleIsPerfect) {
  const SyntheticCorpus c = generate(SyntheticSpec{});
  const auto lex = parse_lexicon_text(c.lexicon_tsv, LexiconSpec{"s", 4, "", LexiconValueKind::kScalar});
  std::vector<ParsedLexicon> v = {lex};
  const LexiconFeatureTable table = build_feature_table(v);
  std::size_t correct = 0;
  for (const auto& e : c.test) {
    double sum = 0.0;
    for (const auto& t : tokenize(e.text))
      for (double x : table.lookup(t)) sum += x;
    correct += (sum > 0 ? kPositiveLabel : kNegativeLabel) == e.label;
  }
  EXPECT_EQ(correct, c.test.size());
}

TEST(SyntheticTest, SameSeedSameFiles) {
  const auto a = testing::scratch_dir("synth_a");
  const auto b = testing::scratch_dir("synth_b");
  write_corpus(generate(SyntheticSpec{}), a);
  write_corpus(generate(SyntheticSpec{}), b);
  for (const char* f : {"train.tsv", "val.tsv", "test.tsv", "lexicon.tsv"}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  SyntheticSpec other;
  other.seed = 2;
  EXPECT_NE(format_dataset(generate(other).train), read_file(a / "train.tsv"));
}

}  // namespace
}  // namespace lexattn
