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

#ifndef LEXATTN_TOOLS_RUN_CONFIG_H_
#define LEXATTN_TOOLS_RUN_CONFIG_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lexattn/model.h"
#include "lexattn/train.h"

namespace lexattn::cli {

// Everything `train` needs. Field names double as config-file keys and
// command-line flags.
struct RunConfig {
  ModelConfig model;
  TrainConfig train;
  std::size_t seeds = 1;
  std::size_t min_count = 1;
  bool lowercase = true;
  bool lexicon_minmax = false;
  std::string train_path;
  std::string val_path;
  std::string test_path;
  // "name:dims:kind:path" entries.
  std::vector<std::string> lexicons;
  std::string embeddings;
  std::string output_dir;
};

// Every recognised key, in snapshot order.
const std::vector<std::string_view>& config_keys();

// Throws ConfigError for an unknown key or an unparsable value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
std::string get_setting(const RunConfig& config, std::string_view key);

// Flat `key = value` lines; '#' starts a comment line. Throws ParseError
// for malformed or repeated lines and ConfigError for unknown keys.
std::map<std::string, std::string> parse_config_text(std::string_view text,
                                                     const std::string& source_name = "<memory>");
void apply_config_text(RunConfig& config, std::string_view text,
                       const std::string& source_name = "<memory>");

// Snapshot that `parse_config_text` reads back into an identical config.
std::string format_config(const RunConfig& config);

// Input files exist, output_dir set, model/train settings valid.
void validate_for_training(const RunConfig& config);

}  // namespace lexattn::cli

#endif  // LEXATTN_TOOLS_RUN_CONFIG_H_
