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

#include "lexattn/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "lexattn/errors.h"
#include "lexattn/util.h"

namespace lexattn {

void validate(const AttentionReport& report) {
  if (report.tokens.size() != report.weights.size()) {
    throw ContractError("attention report has " + std::to_string(report.tokens.size()) +
                        " tokens but " + std::to_string(report.weights.size()) + " weights");
  }
  double total = 0.0;
  for (double w : report.weights) total += w;
  if (std::abs(total - 1.0) > 1e-6) {
    throw ContractError("attention weights sum to " + format_double(total));
  }
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "svg") return ReportFormat::kSvg;
  throw ConfigError("unknown report format '" + std::string(text) + "' (json or svg)");
}

std::string attention_json(std::span<const AttentionReport> reports) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : reports) {
    validate(r);
    out.push_back({{"tokens", r.tokens},
                   {"weights", r.weights},
                   {"pred", r.pred},
                   {"gold", r.gold},
                   {"variant", r.variant}});
  }
  return out.dump(2) + "\n";
}

std::vector<AttentionReport> parse_attention_json(std::string_view text) {
  std::vector<AttentionReport> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw ContractError("attention JSON must be a list");
    for (const auto& item : doc) {
      AttentionReport r;
      r.tokens = item.at("tokens").get<std::vector<std::string>>();
      r.weights = item.at("weights").get<std::vector<double>>();
      r.pred = item.at("pred").get<std::string>();
      r.gold = item.at("gold").get<std::string>();
      r.variant = item.at("variant").get<std::string>();
      out.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("malformed attention JSON: ") + e.what());
  }
  return out;
}

std::string heat_color(double weight) {
  const double w = std::clamp(weight, 0.0, 1.0);
  const int channel = static_cast<int>(std::lround(255.0 * (1.0 - w)));
  return "rgb(255," + std::to_string(channel) + "," + std::to_string(channel) + ")";
}

namespace {

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

constexpr int kCharWidth = 8;
constexpr int kCellPad = 12;
constexpr int kRowHeight = 44;
constexpr int kLabelWidth = 220;

}  // namespace

std::string attention_svg(std::span<const AttentionReport> reports) {
  int width = 0;
  for (const auto& r : reports) {
    int row = kLabelWidth;
    for (const auto& t : r.tokens) {
      row += std::max<int>(static_cast<int>(t.size()), 5) * kCharWidth + kCellPad;
    }
    width = std::max(width, row);
  }
  const int height = static_cast<int>(reports.size()) * kRowHeight + 8;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                    "\" height=\"" + std::to_string(height) +
                    "\" font-family=\"monospace\" font-size=\"12\">\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    validate(r);
    const int y = static_cast<int>(i) * kRowHeight + 4;
    svg += "<g class=\"example\">\n";
    svg += "<text x=\"4\" y=\"" + std::to_string(y + 22) + "\">" +
           xml_escape(r.variant + " gold=" + r.gold + " pred=" + r.pred) + "</text>\n";
    int x = kLabelWidth;
    for (std::size_t k = 0; k < r.tokens.size(); ++k) {
      const int w = std::max<int>(static_cast<int>(r.tokens[k].size()), 5) * kCharWidth + kCellPad;
      svg += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
             "\" width=\"" + std::to_string(w) + "\" height=\"36\" fill=\"" +
             heat_color(r.weights[k]) + "\" stroke=\"#999\"/>\n";
      svg += "<text x=\"" + std::to_string(x + 4) + "\" y=\"" + std::to_string(y + 15) + "\">" +
             xml_escape(r.tokens[k]) + "</text>\n";
      svg += "<text class=\"weight\" x=\"" + std::to_string(x + 4) + "\" y=\"" +
             std::to_string(y + 31) + "\">" + fixed3(r.weights[k]) + "</text>\n";
      x += w;
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void export_attention(std::span<const AttentionReport> reports, ReportFormat format,
                      const std::filesystem::path& path) {
  if (reports.empty()) throw ContractError("no attention reports to export");
  const std::string body =
      format == ReportFormat::kJson ? attention_json(reports) : attention_svg(reports);
  write_file_atomic(path, body);
}

}  // namespace lexattn
