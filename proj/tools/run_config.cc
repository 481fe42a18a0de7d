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

#include "run_config.h"

#include <filesystem>
#include <functional>

#include "lexattn/errors.h"
#include "lexattn/util.h"

namespace lexattn::cli {
namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct KeyInfo {
  std::string_view name;
  Setter set;
  Getter get;
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw ConfigError("bad value '" + std::string(value) + "' for " + std::string(key) +
                    " (expected " + std::string(want) + ")");
}

std::size_t to_size(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  if (!parse_size(value, out)) bad_value(key, value, "a non-negative integer");
  return out;
}

double to_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!parse_double(value, out)) bad_value(key, value, "a number");
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value, "true or false");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

KeyInfo size_key(std::string_view name, std::size_t RunConfig::*field) {
  return {name, [name, field](RunConfig& c, std::string_view v) { c.*field = to_size(name, v); },
          [field](const RunConfig& c) { return std::to_string(c.*field); }};
}

KeyInfo model_size_key(std::string_view name, std::size_t ModelConfig::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.model.*field = to_size(name, v); },
          [field](const RunConfig& c) { return std::to_string(c.model.*field); }};
}

KeyInfo train_size_key(std::string_view name, std::size_t TrainConfig::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.train.*field = to_size(name, v); },
          [field](const RunConfig& c) { return std::to_string(c.train.*field); }};
}

KeyInfo model_double_key(std::string_view name, double ModelConfig::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.model.*field = to_double(name, v); },
          [field](const RunConfig& c) { return format_double(c.model.*field); }};
}

KeyInfo train_double_key(std::string_view name, double TrainConfig::*field) {
  return {name,
          [name, field](RunConfig& c, std::string_view v) { c.train.*field = to_double(name, v); },
          [field](const RunConfig& c) { return format_double(c.train.*field); }};
}

KeyInfo bool_key(std::string_view name, bool RunConfig::*field) {
  return {name, [name, field](RunConfig& c, std::string_view v) { c.*field = to_bool(name, v); },
          [field](const RunConfig& c) { return from_bool(c.*field); }};
}

KeyInfo path_key(std::string_view name, std::string RunConfig::*field) {
  return {name, [field](RunConfig& c, std::string_view v) { c.*field = std::string(v); },
          [field](const RunConfig& c) { return c.*field; }};
}

const std::vector<KeyInfo>& key_table() {
  static const std::vector<KeyInfo> table = {
      {"variant",
       [](RunConfig& c, std::string_view v) {
         try {
           c.model.variant = parse_variant(v);
         } catch (const ConfigError&) {
           bad_value("variant", v,
                     "baseline, emb_conc, attn_conc, attn_gate, attn_affine or gate_plus_emb_conc");
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.model.variant)); }},
      model_size_key("embed_dim", &ModelConfig::embed_dim),
      model_size_key("hidden_dim", &ModelConfig::hidden_dim),
      model_size_key("attn_dim", &ModelConfig::attn_dim),
      model_double_key("dropout", &ModelConfig::dropout),
      model_double_key("noise_std", &ModelConfig::noise_std),
      {"shared_dropout_mask",
       [](RunConfig& c, std::string_view v) {
         c.model.shared_dropout_mask = to_bool("shared_dropout_mask", v);
       },
       [](const RunConfig& c) { return from_bool(c.model.shared_dropout_mask); }},
      train_double_key("lr", &TrainConfig::lr),
      train_double_key("beta1", &TrainConfig::beta1),
      train_double_key("beta2", &TrainConfig::beta2),
      train_double_key("epsilon", &TrainConfig::epsilon),
      train_double_key("clip_norm", &TrainConfig::clip_norm),
      train_size_key("batch_size", &TrainConfig::batch_size),
      train_size_key("max_epochs", &TrainConfig::max_epochs),
      train_size_key("patience", &TrainConfig::patience),
      {"seed",
       [](RunConfig& c, std::string_view v) {
         std::uint64_t out = 0;
         const std::string s(v);
         std::size_t used = 0;
         try {
           out = std::stoull(s, &used);
         } catch (const std::exception&) {
           used = 0;
         }
         if (s.empty() || used != s.size() || s[0] == '-') bad_value("seed", v, "an unsigned integer");
         c.train.seed = out;
       },
       [](const RunConfig& c) { return std::to_string(c.train.seed); }},
      size_key("seeds", &RunConfig::seeds),
      {"eval_metric",
       [](RunConfig& c, std::string_view v) {
         try {
           c.train.eval_metric = parse_metric(v);
         } catch (const ConfigError&) {
           bad_value("eval_metric", v, "accuracy or macro_f1");
         }
       },
       [](const RunConfig& c) { return std::string(to_string(c.train.eval_metric)); }},
      size_key("min_count", &RunConfig::min_count),
      bool_key("lowercase", &RunConfig::lowercase),
      bool_key("lexicon_minmax", &RunConfig::lexicon_minmax),
      path_key("train", &RunConfig::train_path),
      path_key("val", &RunConfig::val_path),
      path_key("test", &RunConfig::test_path),
      {"lexicons",
       [](RunConfig& c, std::string_view v) {
         c.lexicons.clear();
         if (trim(v).empty()) return;
         for (auto part : split(v, ',')) {
           part = trim(part);
           if (part.empty()) bad_value("lexicons", v, "comma-separated name:dims:kind:path");
           parse_lexicon_spec(part);
           c.lexicons.emplace_back(part);
         }
       },
       [](const RunConfig& c) {
         std::string out;
         for (const auto& l : c.lexicons) out += (out.empty() ? "" : ",") + l;
         return out;
       }},
      path_key("embeddings", &RunConfig::embeddings),
      path_key("output_dir", &RunConfig::output_dir),
  };
  return table;
}

const KeyInfo& find_key(std::string_view key) {
  for (const auto& k : key_table()) {
    if (k.name == key) return k;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

void require_file(std::string_view what, const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ConfigError(std::string(what) + " file not found: " + path);
  }
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = [] {
    std::vector<std::string_view> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value) {
  find_key(key).set(config, trim(value));
}

std::string get_setting(const RunConfig& config, std::string_view key) {
  return find_key(key).get(config);
}

std::map<std::string, std::string> parse_config_text(std::string_view text,
                                                     const std::string& source_name) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ParseError(source_name, line_no, "empty key");
    find_key(key);
    if (!out.emplace(key, std::string(trim(line.substr(eq + 1)))).second) {
      throw ParseError(source_name, line_no, "repeated key '" + key + "'");
    }
  }
  return out;
}

void apply_config_text(RunConfig& config, std::string_view text, const std::string& source_name) {
  for (const auto& [key, value] : parse_config_text(text, source_name)) {
    apply_setting(config, key, value);
  }
}

std::string format_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : key_table()) out += std::string(k.name) + " = " + k.get(config) + '\n';
  return out;
}

void validate_for_training(const RunConfig& config) {
  if (config.train_path.empty()) throw ConfigError("missing required key 'train'");
  if (config.val_path.empty()) throw ConfigError("missing required key 'val'");
  if (config.output_dir.empty()) throw ConfigError("missing required key 'output_dir'");
  require_file("train", config.train_path);
  require_file("val", config.val_path);
  if (!config.test_path.empty()) require_file("test", config.test_path);
  if (!config.embeddings.empty()) require_file("embeddings", config.embeddings);
  for (const auto& l : config.lexicons) require_file("lexicon", parse_lexicon_spec(l).source_path.string());
  if (config.seeds < 1) throw ConfigError("seeds must be >= 1");
  if (config.min_count < 1) throw ConfigError("min_count must be >= 1");
  if (config.model.variant != Variant::kBaseline && config.lexicons.empty()) {
    throw ConfigError("variant " + std::string(to_string(config.model.variant)) +
                      " needs at least one lexicon");
  }
  config.train.validate();
}

}  // namespace lexattn::cli
