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

#ifndef LEXATTN_TEXT_H_
#define LEXATTN_TEXT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexattn/lexicon.h"
#include "lexattn/rng.h"
#include "lexattn/tensor.h"

namespace lexattn {

struct TokenizerOptions {
  bool lowercase = true;
};

// Whitespace split, then every ASCII punctuation character becomes its own
// token. Bytes >= 0x80 are left untouched.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

class Vocabulary {
 public:
  static constexpr std::int32_t kPad = 0;
  static constexpr std::int32_t kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocabulary();

  // Tokens in first-seen order; tokens seen fewer than `min_count` times
  // map to UNK.
  static Vocabulary build(std::span<const std::vector<std::string>> corpus,
                          std::size_t min_count = 1);

  std::int32_t add(std::string_view token);
  // UNK for unknown tokens.
  std::int32_t index(std::string_view token) const;
  bool contains(std::string_view token) const;
  const std::string& token(std::int32_t index) const { return tokens_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return tokens_.size(); }

  std::uint64_t hash() const;

  // One token per line, in index order.
  std::string serialize() const;
  static Vocabulary deserialize(std::string_view text, const std::string& source_name = "<memory>");

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int32_t> index_;
};

enum class EmbeddingInit { kPretrained, kRandom, kZeroPad };

struct EmbeddingMatrix {
  Tensor matrix;  // |V| x W
  std::vector<EmbeddingInit> init;
  // Fraction of non-reserved vocabulary rows taken from the file.
  double coverage = 0.0;
};

// Uniform [-0.05, 0.05] rows, PAD row zero.
EmbeddingMatrix random_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng);

// Text word-vector file: optional "count dim" header, then
// "word v1 ... vW" lines.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::size_t dim, Rng& rng);
EmbeddingMatrix load_embeddings_text(std::string_view text, const Vocabulary& vocab,
                                     std::size_t dim, Rng& rng,
                                     const std::string& source_name = "<memory>");

struct Example {
  std::string label;
  std::string text;
};

// UTF-8 TSV, `label<TAB>text` per line. Blank lines are skipped.
std::vector<Example> read_dataset(const std::filesystem::path& path);
std::vector<Example> parse_dataset(std::string_view text, const std::string& source_name = "<memory>");
std::string format_dataset(std::span<const Example> examples);

// Label strings to class indices, in first-seen order.
class LabelMap {
 public:
  static LabelMap from_examples(std::span<const Example> examples);

  std::int32_t add(std::string_view label);
  std::optional<std::int32_t> find(std::string_view label) const;
  const std::string& label(std::int32_t index) const { return labels_.at(static_cast<std::size_t>(index)); }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  // `index<TAB>label` lines.
  std::string serialize() const;
  static LabelMap deserialize(std::string_view text, const std::string& source_name = "<memory>");

  friend bool operator==(const LabelMap& a, const LabelMap& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::int32_t> index_;
};

struct EncodedExample {
  std::vector<std::string> tokens;  // surface forms
  std::int32_t label = 0;
  std::size_t source_index = 0;
};

// Tokenizes and maps labels. Throws EvaluationError for labels absent from
// `labels` and ContractError for examples with no tokens.
std::vector<EncodedExample> encode_examples(std::span<const Example> examples,
                                            const LabelMap& labels,
                                            const TokenizerOptions& options = {});

struct Batch {
  std::size_t size = 0;     // B
  std::size_t max_len = 0;  // T_max
  std::size_t lex_dim = 0;
  std::vector<std::int32_t> tokens;  // B x T_max, PAD beyond lengths
  std::vector<std::size_t> lengths;  // B
  std::vector<double> lex_feats;     // B x T_max x lex_dim, zero beyond lengths
  std::vector<std::int32_t> labels;  // B
  std::vector<std::size_t> example_ids;

  std::int32_t token(std::size_t b, std::size_t t) const { return tokens[b * max_len + t]; }
  std::span<const double> lex(std::size_t b, std::size_t t) const {
    return {lex_feats.data() + (b * max_len + t) * lex_dim, lex_dim};
  }
  // Same batch with `extra` PAD columns appended.
  Batch padded(std::size_t extra) const;
};

// Shuffles with `shuffle_seed` when given, otherwise keeps input order.
// Lexicon features come from the surface token, before UNK mapping.
std::vector<Batch> make_batches(std::span<const EncodedExample> examples, const Vocabulary& vocab,
                                const LexiconFeatureTable& table, std::size_t batch_size,
                                std::optional<std::uint64_t> shuffle_seed);

}  // namespace lexattn

#endif  // LEXATTN_TEXT_H_
