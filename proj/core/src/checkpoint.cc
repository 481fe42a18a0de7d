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

#include "lexattn/checkpoint.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <map>

#include "lexattn/errors.h"
#include "lexattn/util.h"

namespace lexattn {
namespace {

constexpr std::string_view kMagic = "LXATCKP1";

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    out.append(bytes.data(), sizeof(T));
  } else {
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.append(bytes, sizeof(T));
  }
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& source) : bytes_(bytes), source_(source) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(raw);
  }

  std::string_view take(std::size_t n) {
    need(n);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw ParseError(source_, 0, "truncated checkpoint");
  }

  std::string_view bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::string config_block(const Checkpoint& ck) {
  const ModelConfig& c = ck.config;
  std::string out;
  auto kv = [&out](std::string_view k, const std::string& v) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  };
  kv("variant", std::string(to_string(c.variant)));
  kv("embed_dim", std::to_string(c.embed_dim));
  kv("hidden_dim", std::to_string(c.hidden_dim));
  kv("attn_dim", std::to_string(c.attn_dim));
  kv("lex_dim", std::to_string(c.lex_dim));
  kv("num_classes", std::to_string(c.num_classes));
  kv("dropout", format_double(c.dropout));
  kv("noise_std", format_double(c.noise_std));
  kv("shared_dropout_mask", c.shared_dropout_mask ? "true" : "false");
  kv("lowercase", ck.lowercase ? "true" : "false");
  kv("vocab_size", std::to_string(ck.vocab_size));
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(ck.vocab_hash));
  kv("vocab_hash", hash);
  for (std::size_t i = 0; i < ck.labels.size(); ++i) {
    kv("label." + std::to_string(i), ck.labels.label(static_cast<std::int32_t>(i)));
  }
  return out;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  check_params(checkpoint.config, checkpoint.params);
  if (checkpoint.labels.size() != checkpoint.config.num_classes) {
    throw ContractError("checkpoint label map has " + std::to_string(checkpoint.labels.size()) +
                        " labels for " + std::to_string(checkpoint.config.num_classes) +
                        " classes");
  }
  std::string out(kMagic);
  const std::string config = config_block(checkpoint);
  put<std::uint64_t>(out, config.size());
  out += config;
  const auto named = checkpoint.params.named();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, tensor] : named) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor->rank()));
    for (std::size_t d : tensor->shape()) put<std::uint64_t>(out, d);
    for (double v : tensor->data()) put<double>(out, v);
  }
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes, const std::string& source_name) {
  Reader in(bytes, source_name);
  if (in.take(kMagic.size()) != kMagic) throw ParseError(source_name, 0, "not a checkpoint file");

  const auto config_len = in.get<std::uint64_t>();
  const std::string_view config = in.take(config_len);
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  for (auto line : split(config, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos) throw ParseError(source_name, line_no, "bad config line");
    kv.emplace(std::string(line.substr(0, eq)), std::string(line.substr(eq + 3)));
  }
  auto field = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(source_name, 0, "checkpoint config lacks '" + key + "'");
    return it->second;
  };
  auto size_field = [&](const std::string& key) {
    std::size_t v = 0;
    if (!parse_size(field(key), v)) throw ParseError(source_name, 0, "bad value for " + key);
    return v;
  };
  auto double_field = [&](const std::string& key) {
    double v = 0;
    if (!parse_double(field(key), v)) throw ParseError(source_name, 0, "bad value for " + key);
    return v;
  };

  Checkpoint ck;
  ck.config.variant = parse_variant(field("variant"));
  ck.config.embed_dim = size_field("embed_dim");
  ck.config.hidden_dim = size_field("hidden_dim");
  ck.config.attn_dim = size_field("attn_dim");
  ck.config.lex_dim = size_field("lex_dim");
  ck.config.num_classes = size_field("num_classes");
  ck.config.dropout = double_field("dropout");
  ck.config.noise_std = double_field("noise_std");
  ck.config.shared_dropout_mask = field("shared_dropout_mask") == "true";
  ck.lowercase = field("lowercase") == "true";
  ck.vocab_size = size_field("vocab_size");
  ck.vocab_hash = std::stoull(field("vocab_hash"), nullptr, 16);
  for (std::size_t i = 0; i < ck.config.num_classes; ++i) {
    ck.labels.add(field("label." + std::to_string(i)));
  }

  const auto count = in.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    const auto name_len = in.get<std::uint32_t>();
    const std::string name(in.take(name_len));
    const auto rank = in.get<std::uint32_t>();
    if (rank > 2) throw ParseError(source_name, 0, "tensor " + name + " has rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& d : shape) d = in.get<std::uint64_t>();
    std::vector<double> values(shape_size(shape));
    for (double& v : values) v = in.get<double>();
    Tensor* slot = ck.params.find(name);
    if (slot == nullptr) throw ParseError(source_name, 0, "unknown parameter '" + name + "'");
    *slot = Tensor(std::move(shape), std::move(values));
  }
  if (!in.done()) throw ParseError(source_name, 0, "trailing bytes after checkpoint");
  check_params(ck.config, ck.params);
  if (ck.params.embedding.rows() != ck.vocab_size) {
    throw ParseError(source_name, 0, "embedding rows disagree with vocab_size");
  }
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path), path.string());
}

}  // namespace lexattn
