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

#ifndef LEXATTN_CHECKPOINT_H_
#define LEXATTN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lexattn/model.h"
#include "lexattn/text.h"

namespace lexattn {

// Everything needed to rebuild a trained model next to its vocabulary and
// lexicon table.
struct Checkpoint {
  ModelConfig config;
  LabelMap labels;
  std::uint64_t vocab_hash = 0;
  std::size_t vocab_size = 0;
  bool lowercase = true;
  ModelParams params;
};

// Byte layout (all integers little-endian):
//   magic      8 bytes  "LXATCKP1"
//   config_len u64, then config_len bytes of `key = value` lines
//   count      u32 parameter tensors, each:
//     name_len u32, name bytes, rank u32, dims u64[rank],
//     values   f64[prod(dims)] row-major, IEEE-754 little-endian
std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(std::string_view bytes, const std::string& source_name = "<memory>");

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace lexattn

#endif  // LEXATTN_CHECKPOINT_H_
