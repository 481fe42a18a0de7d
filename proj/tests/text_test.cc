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

#include "lexattn/text.h"

#include <set>

#include <gtest/gtest.h>

#include "lexattn/errors.h"
#include "testing.h"

namespace lexattn {
namespace {

using Tokens = std::vector<std::string>;

TEST(TokenizeTest, PunctuationAndCase) {
  EXPECT_EQ(tokenize("Good, great!"), (Tokens{"good", ",", "great", "!"}));
  EXPECT_EQ(tokenize("Good, great!", {.lowercase = false}), (Tokens{"Good", ",", "great", "!"}));
}

TEST(TokenizeTest, DegenerateInputs) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t\n ").empty());
  EXPECT_EQ(tokenize("a  b"), (Tokens{"a", "b"}));
}

TEST(TokenizeTest, NonAsciiBytesKept) {
  EXPECT_EQ(tokenize("caf\xc3\xa9 ok"), (Tokens{"caf\xc3\xa9", "ok"}));
  EXPECT_EQ(tokenize("don't"), (Tokens{"don", "'", "t"}));
}

TEST(VocabularyTest, ReservedEntries) {
  const Vocabulary v;
  EXPECT_EQ(v.size(), 2u);
  EXPECT_EQ(v.token(Vocabulary::kPad), "<pad>");
  EXPECT_EQ(v.index("anything"), Vocabulary::kUnk);
}

TEST(VocabularyTest, FirstSeenOrderAndMinCount) {
  const std::vector<Tokens> corpus = {{"b", "a", "b"}, {"c", "a", "b"}};
  const Vocabulary all = Vocabulary::build(corpus);
  EXPECT_EQ(all.index("b"), 2);
  EXPECT_EQ(all.index("a"), 3);
  EXPECT_EQ(all.index("c"), 4);
  const Vocabulary frequent = Vocabulary::build(corpus, 2);
  EXPECT_EQ(frequent.size(), 4u);
  EXPECT_EQ(frequent.index("c"), Vocabulary::kUnk);
}

TEST(VocabularyTest, SerializeRoundTrip) {
  const std::vector<Tokens> corpus = {{"x", "y", "z"}};
  const Vocabulary v = Vocabulary::build(corpus);
  const Vocabulary back = Vocabulary::deserialize(v.serialize());
  EXPECT_EQ(back.serialize(), v.serialize());
  EXPECT_EQ(back.hash(), v.hash());
  EXPECT_NE(Vocabulary().hash(), v.hash());
  EXPECT_THROW(Vocabulary::deserialize("x\ny\n"), ParseError);
  EXPECT_THROW(Vocabulary::deserialize("<pad>\n<unk>\nx\nx\n"), ParseError);
}

TEST(EmbeddingTest, RandomRowsInRangeAndPadZero) {
  const std::vector<Tokens> corpus = {{"a", "b"}};
  const Vocabulary v = Vocabulary::build(corpus);
  Rng rng(1);
  const EmbeddingMatrix e = random_embeddings(v, 5, rng);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(e.matrix(0, c), 0.0);
  for (std::size_t i = 5; i < e.matrix.size(); ++i) EXPECT_LE(std::abs(e.matrix[i]), 0.05);
  EXPECT_EQ(e.init[0], EmbeddingInit::kZeroPad);
}

TEST(EmbeddingTest, FileVectorsAndCoverage) {
  const std::vector<Tokens> corpus = {{"a", "b", "c", "d"}};
  const Vocabulary v = Vocabulary::build(corpus);
  Rng rng(1);
  const EmbeddingMatrix e = load_embeddings_text("3 2\na 0.5 -1\nzz 1 1\nc 2 3\n", v, 2, rng);
  EXPECT_EQ(e.matrix(v.index("a"), 0), 0.5);
  EXPECT_EQ(e.matrix(v.index("a"), 1), -1.0);
  EXPECT_EQ(e.matrix(v.index("c"), 1), 3.0);
  EXPECT_EQ(e.init[v.index("b")], EmbeddingInit::kRandom);
  EXPECT_LE(std::abs(e.matrix(v.index("b"), 0)), 0.05);
  EXPECT_DOUBLE_EQ(e.coverage, 0.5);
}

TEST(EmbeddingTest, FormatErrorsCarryLineNumbers) {
  const std::vector<Tokens> corpus = {{"a"}};
  const Vocabulary v = Vocabulary::build(corpus);
  Rng rng(1);
  try {
    load_embeddings_text("a 1 2\nb 1\n", v, 2, rng, "vec.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    load_embeddings_text("10 3\na 1 2\n", v, 2, rng);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(load_embeddings_text("a 1 x\n", v, 2, rng), ParseError);
}

TEST(DatasetTest, ParseAndFormat) {
  const auto ex = parse_dataset("pos\tgreat movie\n\nneg\tawful\tplot\n");
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[1].label, "neg");
  EXPECT_EQ(ex[1].text, "awful\tplot");
  EXPECT_EQ(format_dataset(ex), "pos\tgreat movie\nneg\tawful\tplot\n");
  try {
    parse_dataset("pos\tok\nno tab here\n", "d.tsv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LabelMapTest, FirstSeenOrderAndRoundTrip) {
  const auto ex = parse_dataset("b\tx\na\ty\nb\tz\n");
  const LabelMap m = LabelMap::from_examples(ex);
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"b", "a"}));
  EXPECT_EQ(*m.find("a"), 1);
  EXPECT_FALSE(m.find("c"));
  EXPECT_EQ(m.serialize(), "0\tb\n1\ta\n");
  EXPECT_EQ(LabelMap::deserialize(m.serialize()), m);
  EXPECT_THROW(LabelMap::deserialize("1\tb\n"), ParseError);
}

TEST(EncodeTest, Errors) {
  const auto ex = parse_dataset("a\tword\nzz\tother\n");
  LabelMap m;
  m.add("a");
  try {
    encode_examples(ex, m);
    FAIL();
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
  }
  const std::vector<Example> blank = {{"a", "  "}};
  EXPECT_THROW(encode_examples(blank, m), ContractError);
}

struct Fixture {
  std::vector<EncodedExample> examples;
  Vocabulary vocab;
  LexiconFeatureTable table;
};

Fixture make_fixture(std::size_t n) {
  Fixture f;
  std::vector<Example> raw;
  Rng rng(12);
  const char* words[] = {"good", "bad", "meh", "plot", "Great", "film", "rare"};
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    const std::size_t len = 1 + rng.index(6);
    for (std::size_t t = 0; t < len; ++t) text += std::string(words[rng.index(7)]) + " ";
    raw.push_back({i % 2 ? "pos" : "neg", text});
  }
  f.examples = encode_examples(raw, LabelMap::from_examples(raw));
  std::vector<Tokens> corpus;
  for (const auto& e : f.examples) {
    if (std::find(e.tokens.begin(), e.tokens.end(), "rare") == e.tokens.end()) {
      corpus.push_back(e.tokens);
    }
  }
  f.vocab = Vocabulary::build(corpus);
  std::vector<ParsedLexicon> lex = {
      parse_lexicon_text("good\t1\t0\nbad\t0\t1\nrare\t1\t1\n",
                         LexiconSpec{"pol", 2, "", LexiconValueKind::kBinary}),
      parse_lexicon_text("great\t0.9\n", LexiconSpec{"score", 1, "", LexiconValueKind::kScalar})};
  f.table = build_feature_table(lex);
  return f;
}

TEST(BatchTest, ShapesPaddingAndPartialBatch) {
  const Fixture f = make_fixture(10);
  const auto batches = make_batches(f.examples, f.vocab, f.table, 4, std::nullopt);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[2].size, 2u);
  for (const Batch& b : batches) {
    std::size_t longest = 0;
    for (std::size_t i = 0; i < b.size; ++i) {
      longest = std::max(longest, b.lengths[i]);
      EXPECT_GE(b.lengths[i], 1u);
      for (std::size_t t = 0; t < b.max_len; ++t) {
        // The PAD mask derived from lengths is exactly the PAD positions.
        EXPECT_EQ(b.token(i, t) == Vocabulary::kPad, t >= b.lengths[i]);
        if (t >= b.lengths[i]) {
          for (double v : b.lex(i, t)) EXPECT_EQ(v, 0.0);
        }
      }
    }
    EXPECT_EQ(b.max_len, longest);
    EXPECT_EQ(b.lex_dim, 3u);
  }
}

TEST(BatchTest, LexiconFeaturesFollowSurfaceTokens) {
  const Fixture f = make_fixture(60);
  ASSERT_FALSE(f.vocab.contains("rare"));
  bool saw_rare = false;
  for (const Batch& b : make_batches(f.examples, f.vocab, f.table, 7, 99)) {
    for (std::size_t i = 0; i < b.size; ++i) {
      const auto& ex = f.examples[b.example_ids[i]];
      ASSERT_EQ(ex.tokens.size(), b.lengths[i]);
      for (std::size_t t = 0; t < b.lengths[i]; ++t) {
        const auto got = b.lex(i, t);
        const auto want = f.table.lookup(ex.tokens[t]);
        EXPECT_TRUE(std::equal(got.begin(), got.end(), want.begin(), want.end()));
        if (ex.tokens[t] == "rare") {
          saw_rare = true;
          EXPECT_EQ(b.token(i, t), Vocabulary::kUnk);
          EXPECT_EQ(got[0], 1.0);
        }
      }
    }
  }
  EXPECT_TRUE(saw_rare);
}

TEST(BatchTest, SeededShuffleIsReproducible) {
  const Fixture f = make_fixture(30);
  auto ids = [&](std::optional<std::uint64_t> seed) {
    std::vector<std::size_t> out;
    for (const Batch& b : make_batches(f.examples, f.vocab, f.table, 8, seed)) {
      out.insert(out.end(), b.example_ids.begin(), b.example_ids.end());
    }
    return out;
  };
  EXPECT_EQ(ids(5), ids(5));
  EXPECT_NE(ids(5), ids(6));
  const auto ordered = ids(std::nullopt);
  for (std::size_t i = 0; i < ordered.size(); ++i) EXPECT_EQ(ordered[i], i);
  std::vector<std::size_t> shuffled = ids(5);
  std::sort(shuffled.begin(), shuffled.end());
  EXPECT_EQ(shuffled, ordered);
}

TEST(BatchTest, PaddedAppendsPadColumns) {
  const Fixture f = make_fixture(5);
  const Batch b = make_batches(f.examples, f.vocab, f.table, 5, std::nullopt)[0];
  const Batch w = b.padded(2);
  EXPECT_EQ(w.max_len, b.max_len + 2);
  for (std::size_t i = 0; i < b.size; ++i) {
    for (std::size_t t = 0; t < b.max_len; ++t) EXPECT_EQ(w.token(i, t), b.token(i, t));
    EXPECT_EQ(w.token(i, b.max_len + 1), Vocabulary::kPad);
  }
}

TEST(BatchTest, Errors) {
  const Fixture f = make_fixture(3);
  EXPECT_THROW(make_batches({}, f.vocab, f.table, 4, std::nullopt), ContractError);
  EXPECT_THROW(make_batches(f.examples, f.vocab, f.table, 0, std::nullopt), ContractError);
}

}  // namespace
}  // namespace lexattn
