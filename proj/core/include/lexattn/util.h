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

#ifndef LEXATTN_UTIL_H_
#define LEXATTN_UTIL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lexattn {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
// Whole-string parses; false on any trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_size(std::string_view text, std::size_t& out);

std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes to a sibling temporary and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace lexattn

#endif  // LEXATTN_UTIL_H_
