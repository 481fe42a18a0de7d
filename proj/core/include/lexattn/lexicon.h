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

#ifndef LEXATTN_LEXICON_H_
#define LEXATTN_LEXICON_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexattn {

enum class LexiconValueKind { kBinary, kScalar, kCategoricalMultiHot };

std::string_view to_string(LexiconValueKind kind);
LexiconValueKind parse_value_kind(std::string_view text);

struct LexiconSpec {
  std::string name;
  std::size_t dims = 1;
  std::filesystem::path source_path;
  LexiconValueKind value_kind = LexiconValueKind::kScalar;
};

// Parses "name:dims:kind:path". Everything after the third ':' is the path.
LexiconSpec parse_lexicon_spec(std::string_view text);

struct ParsedLexicon {
  LexiconSpec spec;
  std::unordered_map<std::string, std::vector<double>> entries;
  // Words that appeared more than once; the last occurrence is kept.
  std::size_t duplicate_warnings = 0;
  // Entry lines read (comments and blank lines excluded).
  std::size_t entry_lines = 0;
};

// Reads a `word<TAB>v1<TAB>...<TAB>v_dims` file. Lines starting with '#' and
// blank lines are skipped.
ParsedLexicon parse_lexicon(const std::filesystem::path& path, const LexiconSpec& spec);
ParsedLexicon parse_lexicon_text(std::string_view text, const LexiconSpec& spec,
                                 const std::string& source_name = "<memory>");

struct LexiconBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t dims = 0;

  friend bool operator==(const LexiconBlock&, const LexiconBlock&) = default;
};

// Word -> concatenated per-lexicon feature vector c(w). Immutable once
// built; a word missing from a lexicon has zeros in that lexicon's block.
class LexiconFeatureTable {
 public:
  LexiconFeatureTable() = default;

  const std::vector<LexiconBlock>& layout() const { return layout_; }
  std::size_t total_dims() const { return total_dims_; }
  std::size_t size() const { return entries_.size(); }

  // Stored vector, or all zeros for an unknown word. Case-sensitive.
  std::span<const double> lookup(std::string_view word) const;
  bool contains(std::string_view word) const;

  // Words sorted bytewise, for deterministic iteration.
  std::vector<std::string> sorted_words() const;

  // Rescales every block column to [0, 1] over the stored words. Columns
  // with a constant value are left unchanged.
  void scale_blocks_minmax();

  friend bool operator==(const LexiconFeatureTable&, const LexiconFeatureTable&) = default;

 private:
  friend LexiconFeatureTable build_feature_table(std::span<const ParsedLexicon> lexicons);
  friend LexiconFeatureTable import_feature_table(std::string_view text,
                                                  const std::string& source_name);

  std::vector<LexiconBlock> layout_;
  std::size_t total_dims_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
  std::vector<double> zeros_;
};

// Union of all vocabularies, blocks in input order.
LexiconFeatureTable build_feature_table(std::span<const ParsedLexicon> lexicons);

// Compiled table format:
//   !layout
//   name<TAB>offset<TAB>dims        (one line per lexicon)
//   !entries
//   word<TAB>v1<TAB>...<TAB>v_total (one line per word, sorted)
std::string export_feature_table(const LexiconFeatureTable& table);
LexiconFeatureTable import_feature_table(std::string_view text,
                                         const std::string& source_name = "<memory>");
void save_feature_table(const LexiconFeatureTable& table, const std::filesystem::path& path);
LexiconFeatureTable load_feature_table(const std::filesystem::path& path);

}  // namespace lexattn

#endif  // LEXATTN_LEXICON_H_
