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

#ifndef LEXATTN_TOOLS_COMMANDS_H_
#define LEXATTN_TOOLS_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lexattn/checkpoint.h"
#include "lexattn/lexicon.h"
#include "lexattn/text.h"
#include "run_config.h"

namespace lexattn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

// Entry point shared by the binary and the tests. args[0] is the program
// name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Maps the active exception to an exit code and prints it to `err`.
int report_exception(std::ostream& err);

// Trains one model per seed and writes the run directory. Returns the
// per-seed test (or best validation) metric.
std::vector<double> train_command(const RunConfig& config, std::ostream& out);

// Trained model plus the vocabulary and lexicon table stored next to it.
struct LoadedModel {
  Checkpoint checkpoint;
  Vocabulary vocab;
  LexiconFeatureTable table;
};

// Looks for vocab.txt and lexicon.table in the checkpoint's directory, then
// in its parent (multi-seed runs).
LoadedModel load_model(const std::filesystem::path& checkpoint_path);

// Reads and encodes a dataset against the checkpoint's label map. Throws
// ConfigError for an empty file, EvaluationError for unknown labels.
std::vector<EncodedExample> load_eval_data(const LoadedModel& model,
                                           const std::filesystem::path& path);

}  // namespace lexattn::cli

#endif  // LEXATTN_TOOLS_COMMANDS_H_
