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

#ifndef LEXATTN_SYNTHETIC_H_
#define LEXATTN_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexattn/text.h"

namespace lexattn {

enum class LabelRule { kMajorityPolarity };

// Corpus where the label is the sign of the summed lexicon polarities of a
// few signal words hidden among noise words. Train/validation and test draw
// signal words from disjoint vocabularies, so only the lexicon channel
// carries label information to the test split.
struct SyntheticSpec {
  std::size_t signal_train_vocab = 400;
  std::size_t signal_test_vocab = 400;
  std::size_t noise_vocab = 200;
  std::size_t min_len = 8;
  std::size_t max_len = 12;
  std::size_t signal_words_per_seq = 3;
  LabelRule label_rule = LabelRule::kMajorityPolarity;
  std::size_t lex_dim = 4;
  std::size_t train_size = 4000;
  std::size_t val_size = 500;
  std::size_t test_size = 1000;
  std::uint64_t seed = 1;

  // Throws ConfigError (e.g. even signal_words_per_seq).
  void validate() const;
};

inline constexpr std::string_view kPositiveLabel = "positive";
inline constexpr std::string_view kNegativeLabel = "negative";

struct SyntheticCorpus {
  std::vector<Example> train;
  std::vector<Example> val;  // signal words from the training vocabulary
  std::vector<Example> test;
  std::vector<std::string> signal_train_words;
  std::vector<std::string> signal_test_words;
  std::vector<std::string> noise_words;
  // Signal word -> +1 / -1.
  std::unordered_map<std::string, int> polarity;
  // `word<TAB>v1..v_lex_dim`: one nonzero dimension holding the polarity.
  std::string lexicon_tsv;
};

SyntheticCorpus generate(const SyntheticSpec& spec);

// Writes train.tsv, val.tsv, test.tsv and lexicon.tsv into `dir`.
void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace lexattn

#endif  // LEXATTN_SYNTHETIC_H_
