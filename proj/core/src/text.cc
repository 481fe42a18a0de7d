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

#include <algorithm>
#include <numeric>
#include <utility>

#include "lexattn/errors.h"
#include "lexattn/util.h"

namespace lexattn {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (unsigned char c : text) {
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      if (options.lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      current.push_back(static_cast<char>(c));
    }
  }
  flush();
  return out;
}

Vocabulary::Vocabulary() {
  add(kPadToken);
  add(kUnkToken);
}

Vocabulary Vocabulary::build(std::span<const std::vector<std::string>> corpus,
                             std::size_t min_count) {
  std::unordered_map<std::string_view, std::size_t> counts;
  std::vector<std::string_view> order;
  for (const auto& tokens : corpus) {
    for (const auto& tok : tokens) {
      auto [it, inserted] = counts.try_emplace(tok, 0);
      if (inserted) order.push_back(tok);
      ++it->second;
    }
  }
  Vocabulary vocab;
  for (auto tok : order) {
    if (counts[tok] >= min_count) vocab.add(tok);
  }
  return vocab;
}

std::int32_t Vocabulary::add(std::string_view token) {
  if (auto it = index_.find(std::string(token)); it != index_.end()) return it->second;
  const auto id = static_cast<std::int32_t>(tokens_.size());
  tokens_.emplace_back(token);
  index_.emplace(tokens_.back(), id);
  return id;
}

std::int32_t Vocabulary::index(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.find(std::string(token)) != index_.end();
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = fnv1a("");
  for (const auto& tok : tokens_) {
    h = fnv1a(tok, h);
    h = fnv1a("\n", h);
  }
  return h;
}

std::string Vocabulary::serialize() const {
  std::string out;
  for (const auto& tok : tokens_) {
    out += tok;
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::deserialize(std::string_view text, const std::string& source_name) {
  auto lines = split(text, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2 || strip_cr(lines[0]) != kPadToken || strip_cr(lines[1]) != kUnkToken) {
    throw ParseError(source_name, 1, "vocabulary must start with " + std::string(kPadToken) +
                                         " and " + std::string(kUnkToken));
  }
  Vocabulary vocab;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const auto tok = strip_cr(lines[i]);
    if (tok.empty() || vocab.contains(tok)) {
      throw ParseError(source_name, i + 1, "empty or repeated token");
    }
    vocab.add(tok);
  }
  return vocab;
}

EmbeddingMatrix random_embeddings(const Vocabulary& vocab, std::size_t dim, Rng& rng) {
  EmbeddingMatrix emb;
  emb.matrix = Tensor({vocab.size(), dim});
  emb.init.assign(vocab.size(), EmbeddingInit::kRandom);
  emb.init[Vocabulary::kPad] = EmbeddingInit::kZeroPad;
  for (std::size_t r = 1; r < vocab.size(); ++r) {
    for (std::size_t c = 0; c < dim; ++c) emb.matrix(r, c) = rng.uniform(-0.05, 0.05);
  }
  return emb;
}

EmbeddingMatrix load_embeddings_text(std::string_view text, const Vocabulary& vocab,
                                     std::size_t dim, Rng& rng, const std::string& source_name) {
  EmbeddingMatrix emb = random_embeddings(vocab, dim, rng);
  std::size_t found = 0;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = trim(strip_cr(raw));
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    for (auto f : split(line, ' ')) {
      if (!f.empty()) fields.push_back(f);
    }
    if (line_no == 1 && fields.size() == 2) {
      std::size_t count = 0, header_dim = 0;
      if (parse_size(fields[0], count) && parse_size(fields[1], header_dim)) {
        if (header_dim != dim) {
          throw ParseError(source_name, line_no,
                           "header declares dim " + std::to_string(header_dim) + ", expected " +
                               std::to_string(dim));
        }
        continue;
      }
    }
    if (fields.size() != dim + 1) {
      throw ParseError(source_name, line_no,
                       "expected word and " + std::to_string(dim) + " values, got " +
                           std::to_string(fields.size() - 1));
    }
    std::vector<double> values(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      if (!parse_double(fields[c + 1], values[c])) {
        throw ParseError(source_name, line_no, "non-numeric value '" + std::string(fields[c + 1]) + "'");
      }
    }
    if (!vocab.contains(fields[0])) continue;
    const auto row = static_cast<std::size_t>(vocab.index(fields[0]));
    if (row == static_cast<std::size_t>(Vocabulary::kPad)) continue;
    if (row >= 2 && emb.init[row] != EmbeddingInit::kPretrained) ++found;
    emb.init[row] = EmbeddingInit::kPretrained;
    std::copy(values.begin(), values.end(), &emb.matrix(row, 0));
  }
  const std::size_t candidates = vocab.size() - 2;
  emb.coverage = candidates == 0 ? 0.0 : static_cast<double>(found) / static_cast<double>(candidates);
  return emb;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab,
                                std::size_t dim, Rng& rng) {
  return load_embeddings_text(read_file(path), vocab, dim, rng, path.string());
}

std::vector<Example> parse_dataset(std::string_view text, const std::string& source_name) {
  std::vector<Example> out;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (trim(line).empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError(source_name, line_no, "expected label<TAB>text");
    }
    const auto label = trim(line.substr(0, tab));
    if (label.empty()) throw ParseError(source_name, line_no, "empty label");
    out.push_back({std::string(label), std::string(line.substr(tab + 1))});
  }
  return out;
}

std::vector<Example> read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

std::string format_dataset(std::span<const Example> examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += ex.label;
    out += '\t';
    out += ex.text;
    out += '\n';
  }
  return out;
}

LabelMap LabelMap::from_examples(std::span<const Example> examples) {
  LabelMap map;
  for (const auto& ex : examples) map.add(ex.label);
  return map;
}

std::int32_t LabelMap::add(std::string_view label) {
  if (auto found = find(label)) return *found;
  const auto id = static_cast<std::int32_t>(labels_.size());
  labels_.emplace_back(label);
  index_.emplace(labels_.back(), id);
  return id;
}

std::optional<std::int32_t> LabelMap::find(std::string_view label) const {
  const auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string LabelMap::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out += std::to_string(i) + '\t' + labels_[i] + '\n';
  }
  return out;
}

LabelMap LabelMap::deserialize(std::string_view text, const std::string& source_name) {
  LabelMap map;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    std::size_t idx = 0;
    if (f.size() != 2 || !parse_size(f[0], idx) || idx != map.size() || map.find(f[1])) {
      throw ParseError(source_name, line_no, "expected '<index><TAB><label>' in order");
    }
    map.add(f[1]);
  }
  return map;
}

std::vector<EncodedExample> encode_examples(std::span<const Example> examples,
                                            const LabelMap& labels,
                                            const TokenizerOptions& options) {
  std::vector<EncodedExample> out;
  out.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    EncodedExample enc;
    enc.tokens = tokenize(examples[i].text, options);
    if (enc.tokens.empty()) {
      throw ContractError("example " + std::to_string(i) + " has no tokens");
    }
    const auto label = labels.find(examples[i].label);
    if (!label) {
      throw EvaluationError("example " + std::to_string(i) + " has label '" +
                            examples[i].label + "' unknown to the model");
    }
    enc.label = *label;
    enc.source_index = i;
    out.push_back(std::move(enc));
  }
  return out;
}

Batch Batch::padded(std::size_t extra) const {
  Batch out = *this;
  out.max_len = max_len + extra;
  out.tokens.assign(size * out.max_len, Vocabulary::kPad);
  out.lex_feats.assign(size * out.max_len * lex_dim, 0.0);
  for (std::size_t b = 0; b < size; ++b) {
    for (std::size_t t = 0; t < max_len; ++t) {
      out.tokens[b * out.max_len + t] = token(b, t);
      const auto src = lex(b, t);
      std::copy(src.begin(), src.end(), out.lex_feats.begin() + static_cast<long>((b * out.max_len + t) * lex_dim));
    }
  }
  return out;
}

std::vector<Batch> make_batches(std::span<const EncodedExample> examples, const Vocabulary& vocab,
                                const LexiconFeatureTable& table, std::size_t batch_size,
                                std::optional<std::uint64_t> shuffle_seed) {
  if (examples.empty()) throw ContractError("make_batches: empty dataset");
  if (batch_size == 0) throw ContractError("make_batches: batch_size must be >= 1");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    rng.shuffle(order);
  }
  const std::size_t lex_dim = table.total_dims();
  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t end = std::min(order.size(), start + batch_size);
    Batch batch;
    batch.size = end - start;
    batch.lex_dim = lex_dim;
    for (std::size_t i = start; i < end; ++i) {
      const auto& ex = examples[order[i]];
      if (ex.tokens.empty()) {
        throw ContractError("example " + std::to_string(ex.source_index) + " has no tokens");
      }
      batch.max_len = std::max(batch.max_len, ex.tokens.size());
    }
    batch.tokens.assign(batch.size * batch.max_len, Vocabulary::kPad);
    batch.lex_feats.assign(batch.size * batch.max_len * lex_dim, 0.0);
    for (std::size_t b = 0; b < batch.size; ++b) {
      const auto& ex = examples[order[start + b]];
      batch.lengths.push_back(ex.tokens.size());
      batch.labels.push_back(ex.label);
      batch.example_ids.push_back(ex.source_index);
      for (std::size_t t = 0; t < ex.tokens.size(); ++t) {
        batch.tokens[b * batch.max_len + t] = vocab.index(ex.tokens[t]);
        const auto feats = table.lookup(ex.tokens[t]);
        std::copy(feats.begin(), feats.end(),
                  batch.lex_feats.begin() + static_cast<long>((b * batch.max_len + t) * lex_dim));
      }
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace lexattn
