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

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "lexattn/errors.h"
#include "lexattn/rng.h"
#include "lexattn/util.h"

namespace lexattn {
namespace {

std::vector<std::string> make_words(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
    out.emplace_back(buf);
  }
  return out;
}

// Exactly balanced polarities (the odd one out is a coin flip).
void assign_polarities(const std::vector<std::string>& words, Rng& rng,
                       std::unordered_map<std::string, int>& polarity) {
  std::vector<int> signs(words.size());
  for (std::size_t i = 0; i < signs.size(); ++i) signs[i] = i % 2 == 0 ? 1 : -1;
  if (signs.size() % 2 == 1) signs.back() = rng.bernoulli(0.5) ? 1 : -1;
  rng.shuffle(signs);
  for (std::size_t i = 0; i < words.size(); ++i) polarity[words[i]] = signs[i];
}

Example make_example(const SyntheticSpec& spec, const std::vector<std::string>& signal,
                     const std::vector<std::string>& noise,
                     const std::unordered_map<std::string, int>& polarity, Rng& rng) {
  const std::size_t len = spec.min_len + rng.index(spec.max_len - spec.min_len + 1);
  std::vector<std::size_t> positions(len);
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  rng.shuffle(positions);
  std::vector<bool> is_signal(len, false);
  for (std::size_t k = 0; k < spec.signal_words_per_seq; ++k) is_signal[positions[k]] = true;

  int sum = 0;
  std::string text;
  for (std::size_t t = 0; t < len; ++t) {
    const std::string& word =
        is_signal[t] ? signal[rng.index(signal.size())] : noise[rng.index(noise.size())];
    if (is_signal[t]) sum += polarity.at(word);
    if (!text.empty()) text += ' ';
    text += word;
  }
  return {std::string(sum > 0 ? kPositiveLabel : kNegativeLabel), std::move(text)};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (signal_words_per_seq == 0 || signal_words_per_seq % 2 == 0) {
    throw ConfigError("signal_words_per_seq must be odd and >= 1, got " +
                      std::to_string(signal_words_per_seq));
  }
  if (signal_train_vocab == 0 || signal_test_vocab == 0) {
    throw ConfigError("signal vocabularies must be non-empty");
  }
  if (min_len < signal_words_per_seq || min_len > max_len) {
    throw ConfigError("need signal_words_per_seq <= min_len <= max_len");
  }
  if (max_len > signal_words_per_seq && noise_vocab == 0) {
    throw ConfigError("noise_vocab must be non-empty when sequences hold noise words");
  }
  if (lex_dim == 0) throw ConfigError("lex_dim must be >= 1");
  if (train_size == 0 || val_size == 0 || test_size == 0) {
    throw ConfigError("split sizes must be >= 1");
  }
}

SyntheticCorpus generate(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  SyntheticCorpus c;
  c.signal_train_words = make_words("strn", spec.signal_train_vocab);
  c.signal_test_words = make_words("stst", spec.signal_test_vocab);
  c.noise_words = make_words("noise", spec.noise_vocab);
  assign_polarities(c.signal_train_words, rng, c.polarity);
  assign_polarities(c.signal_test_words, rng, c.polarity);

  for (const auto* words : {&c.signal_train_words, &c.signal_test_words}) {
    for (const auto& w : *words) {
      std::vector<double> values(spec.lex_dim, 0.0);
      values[rng.index(spec.lex_dim)] = c.polarity.at(w);
      c.lexicon_tsv += w;
      for (double v : values) c.lexicon_tsv += '\t' + format_double(v);
      c.lexicon_tsv += '\n';
    }
  }

  for (std::size_t i = 0; i < spec.train_size; ++i)
    c.train.push_back(make_example(spec, c.signal_train_words, c.noise_words, c.polarity, rng));
  for (std::size_t i = 0; i < spec.val_size; ++i)
    c.val.push_back(make_example(spec, c.signal_train_words, c.noise_words, c.polarity, rng));
  for (std::size_t i = 0; i < spec.test_size; ++i)
    c.test.push_back(make_example(spec, c.signal_test_words, c.noise_words, c.polarity, rng));
  return c;
}

void write_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());
  write_file_atomic(dir / "train.tsv", format_dataset(corpus.train));
  write_file_atomic(dir / "val.tsv", format_dataset(corpus.val));
  write_file_atomic(dir / "test.tsv", format_dataset(corpus.test));
  write_file_atomic(dir / "lexicon.tsv", corpus.lexicon_tsv);
}

}  // namespace lexattn
