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

#ifndef LEXATTN_REPORT_H_
#define LEXATTN_REPORT_H_

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexattn {

// Attention distribution of one example over its valid tokens.
struct AttentionReport {
  std::vector<std::string> tokens;
  std::vector<double> weights;
  std::string pred;
  std::string gold;
  std::string variant;

  friend bool operator==(const AttentionReport&, const AttentionReport&) = default;
};

// Throws ContractError unless tokens and weights align and the weights sum
// to 1 within 1e-6.
void validate(const AttentionReport& report);

enum class ReportFormat { kJson, kSvg };

ReportFormat parse_report_format(std::string_view text);

// Top-level list of {tokens, weights, pred, gold, variant}.
std::string attention_json(std::span<const AttentionReport> reports);
std::vector<AttentionReport> parse_attention_json(std::string_view text);

// One row per example; each token cell is filled on a linear white-to-red
// scale by its weight, with the weight printed to three decimals.
std::string attention_svg(std::span<const AttentionReport> reports);
// Fill colour of a cell with the given weight, as "rgb(r,g,b)".
std::string heat_color(double weight);

void export_attention(std::span<const AttentionReport> reports, ReportFormat format,
                      const std::filesystem::path& path);

}  // namespace lexattn

#endif  // LEXATTN_REPORT_H_
