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

#include "lexattn/lexicon.h"

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "lexattn/errors.h"
#include "lexattn/util.h"

namespace lexattn {
namespace {

constexpr std::string_view kLayoutSentinel = "!layout";
constexpr std::string_view kEntriesSentinel = "!entries";

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::string_view to_string(LexiconValueKind kind) {
  switch (kind) {
    case LexiconValueKind::kBinary:
      return "binary";
    case LexiconValueKind::kScalar:
      return "scalar";
    case LexiconValueKind::kCategoricalMultiHot:
      return "multihot";
  }
  return "scalar";
}

LexiconValueKind parse_value_kind(std::string_view text) {
  if (text == "binary") return LexiconValueKind::kBinary;
  if (text == "scalar") return LexiconValueKind::kScalar;
  if (text == "multihot" || text == "categorical-multi-hot") {
    return LexiconValueKind::kCategoricalMultiHot;
  }
  throw ConfigError("unknown lexicon value kind '" + std::string(text) +
                    "' (expected binary, scalar or multihot)");
}

LexiconSpec parse_lexicon_spec(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const auto pos = text.find(':', start);
    if (pos == std::string_view::npos) {
      throw ConfigError("lexicon spec '" + std::string(text) +
                        "' is not name:dims:kind:path");
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  parts.push_back(text.substr(start));

  LexiconSpec spec;
  spec.name = std::string(trim(parts[0]));
  if (spec.name.empty()) throw ConfigError("lexicon spec '" + std::string(text) + "' has no name");
  if (!parse_size(trim(parts[1]), spec.dims) || spec.dims == 0) {
    throw ConfigError("lexicon '" + spec.name + "': dims must be a positive integer");
  }
  spec.value_kind = parse_value_kind(trim(parts[2]));
  spec.source_path = std::string(trim(parts[3]));
  if (spec.source_path.empty()) throw ConfigError("lexicon '" + spec.name + "' has no path");
  return spec;
}

ParsedLexicon parse_lexicon_text(std::string_view text, const LexiconSpec& spec,
                                 const std::string& source_name) {
  if (spec.dims == 0) throw ConfigError("lexicon '" + spec.name + "' declares 0 dims");
  ParsedLexicon out;
  out.spec = spec;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (trim(line).empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != spec.dims + 1) {
      throw ParseError(source_name, line_no,
                       "expected word and " + std::to_string(spec.dims) + " values, got " +
                           std::to_string(fields.size()) + " fields");
    }
    if (fields[0].empty()) throw ParseError(source_name, line_no, "empty word");
    std::vector<double> values(spec.dims);
    for (std::size_t d = 0; d < spec.dims; ++d) {
      if (!parse_double(trim(fields[d + 1]), values[d])) {
        throw ParseError(source_name, line_no,
                         "non-numeric value '" + std::string(fields[d + 1]) + "'");
      }
      if (spec.value_kind != LexiconValueKind::kScalar && values[d] != 0.0 &&
          values[d] != 1.0) {
        throw ParseError(source_name, line_no,
                         std::string(to_string(spec.value_kind)) +
                             " lexicon value must be 0 or 1, got " + std::string(fields[d + 1]));
      }
    }
    ++out.entry_lines;
    auto [it, inserted] = out.entries.insert_or_assign(std::string(fields[0]), std::move(values));
    if (!inserted) ++out.duplicate_warnings;
  }
  return out;
}

ParsedLexicon parse_lexicon(const std::filesystem::path& path, const LexiconSpec& spec) {
  return parse_lexicon_text(read_file(path), spec, path.string());
}

std::span<const double> LexiconFeatureTable::lookup(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  if (it == entries_.end()) return zeros_;
  return it->second;
}

bool LexiconFeatureTable::contains(std::string_view word) const {
  return entries_.find(std::string(word)) != entries_.end();
}

std::vector<std::string> LexiconFeatureTable::sorted_words() const {
  std::vector<std::string> words;
  words.reserve(entries_.size());
  for (const auto& [w, _] : entries_) words.push_back(w);
  std::sort(words.begin(), words.end());
  return words;
}

void LexiconFeatureTable::scale_blocks_minmax() {
  for (std::size_t d = 0; d < total_dims_; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& [_, v] : entries_) {
      lo = std::min(lo, v[d]);
      hi = std::max(hi, v[d]);
    }
    if (!(hi > lo)) continue;
    for (auto& [_, v] : entries_) v[d] = (v[d] - lo) / (hi - lo);
  }
}

LexiconFeatureTable build_feature_table(std::span<const ParsedLexicon> lexicons) {
  LexiconFeatureTable table;
  std::set<std::string> names;
  for (const auto& lex : lexicons) {
    if (!names.insert(lex.spec.name).second) {
      throw ConfigError("duplicate lexicon name '" + lex.spec.name + "'");
    }
    table.layout_.push_back({lex.spec.name, table.total_dims_, lex.spec.dims});
    table.total_dims_ += lex.spec.dims;
  }
  table.zeros_.assign(table.total_dims_, 0.0);
  for (std::size_t k = 0; k < lexicons.size(); ++k) {
    const auto& block = table.layout_[k];
    for (const auto& [word, values] : lexicons[k].entries) {
      auto [it, _] = table.entries_.try_emplace(word, table.total_dims_, 0.0);
      std::copy(values.begin(), values.end(), it->second.begin() + static_cast<long>(block.offset));
    }
  }
  return table;
}

std::string export_feature_table(const LexiconFeatureTable& table) {
  std::string out;
  out += kLayoutSentinel;
  out += '\n';
  for (const auto& b : table.layout()) {
    out += b.name + '\t' + std::to_string(b.offset) + '\t' + std::to_string(b.dims) + '\n';
  }
  out += kEntriesSentinel;
  out += '\n';
  for (const auto& word : table.sorted_words()) {
    out += word;
    for (double v : table.lookup(word)) {
      out += '\t';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

LexiconFeatureTable import_feature_table(std::string_view text, const std::string& source_name) {
  LexiconFeatureTable table;
  enum class Section { kStart, kLayout, kEntries } section = Section::kStart;
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    if (section == Section::kStart) {
      if (line != kLayoutSentinel) {
        throw ParseError(source_name, line_no, "missing !layout header");
      }
      section = Section::kLayout;
      continue;
    }
    if (section == Section::kLayout) {
      if (line == kEntriesSentinel) {
        section = Section::kEntries;
        table.zeros_.assign(table.total_dims_, 0.0);
        continue;
      }
      const auto f = split(line, '\t');
      LexiconBlock b;
      if (f.size() != 3 || !parse_size(f[1], b.offset) || !parse_size(f[2], b.dims) ||
          b.dims == 0) {
        throw ParseError(source_name, line_no, "bad layout line");
      }
      if (b.offset != table.total_dims_) {
        throw ParseError(source_name, line_no, "layout offsets are not contiguous");
      }
      b.name = std::string(f[0]);
      table.total_dims_ += b.dims;
      table.layout_.push_back(std::move(b));
      continue;
    }
    const auto f = split(line, '\t');
    if (f.size() != table.total_dims_ + 1) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(table.total_dims_) + " values");
    }
    std::vector<double> values(table.total_dims_);
    for (std::size_t d = 0; d < values.size(); ++d) {
      if (!parse_double(f[d + 1], values[d])) {
        throw ParseError(source_name, line_no, "non-numeric value '" + std::string(f[d + 1]) + "'");
      }
    }
    table.entries_.insert_or_assign(std::string(f[0]), std::move(values));
  }
  if (section != Section::kEntries) {
    throw ParseError(source_name, line_no, "truncated table (no !entries section)");
  }
  return table;
}

void save_feature_table(const LexiconFeatureTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, export_feature_table(table));
}

LexiconFeatureTable load_feature_table(const std::filesystem::path& path) {
  return import_feature_table(read_file(path), path.string());
}

}  // namespace lexattn
