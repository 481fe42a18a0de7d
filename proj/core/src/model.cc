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

#include "lexattn/model.h"

#include <algorithm>
#include <cmath>

#include "lexattn/errors.h"

namespace lexattn {

std::string_view to_string(Variant variant) {
  switch (variant) {
    case Variant::kBaseline:
      return "baseline";
    case Variant::kEmbConc:
      return "emb_conc";
    case Variant::kAttnConc:
      return "attn_conc";
    case Variant::kAttnGate:
      return "attn_gate";
    case Variant::kAttnAffine:
      return "attn_affine";
    case Variant::kGatePlusEmbConc:
      return "gate_plus_emb_conc";
  }
  return "baseline";
}

Variant parse_variant(std::string_view text) {
  for (Variant v : kAllVariants) {
    if (to_string(v) == text) return v;
  }
  throw ConfigError("unknown variant '" + std::string(text) + "'");
}

Conditioning conditioning_of(Variant variant) {
  switch (variant) {
    case Variant::kBaseline:
    case Variant::kEmbConc:
      return Conditioning::kNone;
    case Variant::kAttnConc:
      return Conditioning::kConcat;
    case Variant::kAttnGate:
    case Variant::kGatePlusEmbConc:
      return Conditioning::kGate;
    case Variant::kAttnAffine:
      return Conditioning::kAffine;
  }
  return Conditioning::kNone;
}

bool concatenates_to_embeddings(Variant variant) {
  return variant == Variant::kEmbConc || variant == Variant::kGatePlusEmbConc;
}

void ModelConfig::validate() const {
  if (embed_dim == 0 || hidden_dim == 0 || attn_dim == 0 || num_classes == 0) {
    throw ConfigError("model dimensions must all be >= 1");
  }
  if (lex_dim == 0 && variant != Variant::kBaseline) {
    throw ConfigError("variant " + std::string(to_string(variant)) +
                      " needs lexicon features (lex_dim >= 1)");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
}

std::size_t ModelConfig::lstm_input_dim() const {
  return concatenates_to_embeddings(variant) ? embed_dim + lex_dim : embed_dim;
}

std::size_t ModelConfig::score_dim() const {
  switch (conditioning_of(variant)) {
    case Conditioning::kNone:
    case Conditioning::kConcat:
      return attn_dim;
    case Conditioning::kGate:
    case Conditioning::kAffine:
      return hidden_dim;
  }
  return attn_dim;
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::slots() {
  return {
      {"embedding", &embedding},
      {"lstm.W_i", &lstm.w_input},
      {"lstm.W_f", &lstm.w_forget},
      {"lstm.W_o", &lstm.w_output},
      {"lstm.W_g", &lstm.w_candidate},
      {"lstm.b_i", &lstm.b_input},
      {"lstm.b_f", &lstm.b_forget},
      {"lstm.b_o", &lstm.b_output},
      {"lstm.b_g", &lstm.b_candidate},
      {"attention.W_a", &attention.w},
      {"attention.b_a", &attention.b},
      {"attention.v_a", &attention.v},
      {"cond.W_c", &conditioning.w_concat},
      {"cond.b_c", &conditioning.b_concat},
      {"cond.W_g", &conditioning.w_gate},
      {"cond.b_g", &conditioning.b_gate},
      {"cond.W_gamma", &conditioning.w_gamma},
      {"cond.b_gamma", &conditioning.b_gamma},
      {"cond.W_beta", &conditioning.w_beta},
      {"cond.b_beta", &conditioning.b_beta},
      {"classifier.W_out", &classifier.w},
      {"classifier.b_out", &classifier.b},
  };
}

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
  auto out = slots();
  std::erase_if(out, [](const auto& p) { return p.second->shape().empty(); });
  return out;
}

Tensor* ModelParams::find(std::string_view name) {
  for (auto& [n, t] : slots()) {
    if (n == name) return t;
  }
  return nullptr;
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out;
  for (auto& [name, t] : const_cast<ModelParams*>(this)->named()) out.emplace_back(name, t);
  return out;
}

namespace {

Tensor uniform_weight(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t({rows, cols});
  const double k = 1.0 / std::sqrt(static_cast<double>(cols));
  for (double& v : t.data()) v = rng.uniform(-k, k);
  return t;
}

Tensor uniform_vector(std::size_t n, Rng& rng) {
  Tensor t({n});
  const double k = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : t.data()) v = rng.uniform(-k, k);
  return t;
}

Tensor zeros(std::size_t n) { return Tensor({n}); }

struct Expected {
  std::string name;
  Shape shape;
};

std::vector<Expected> expected_shapes(const ModelConfig& c, std::size_t vocab_size) {
  const std::size_t dh = c.hidden_dim, in = c.lstm_input_dim() + dh;
  std::vector<Expected> e = {
      {"embedding", {vocab_size, c.embed_dim}},
      {"lstm.W_i", {dh, in}},
      {"lstm.W_f", {dh, in}},
      {"lstm.W_o", {dh, in}},
      {"lstm.W_g", {dh, in}},
      {"lstm.b_i", {dh}},
      {"lstm.b_f", {dh}},
      {"lstm.b_o", {dh}},
      {"lstm.b_g", {dh}},
  };
  switch (conditioning_of(c.variant)) {
    case Conditioning::kNone:
      e.push_back({"attention.W_a", {c.attn_dim, dh}});
      e.push_back({"attention.b_a", {c.attn_dim}});
      break;
    case Conditioning::kConcat:
      e.push_back({"cond.W_c", {c.attn_dim, dh + c.lex_dim}});
      e.push_back({"cond.b_c", {c.attn_dim}});
      break;
    case Conditioning::kGate:
      e.push_back({"cond.W_g", {dh, c.lex_dim}});
      e.push_back({"cond.b_g", {dh}});
      break;
    case Conditioning::kAffine:
      e.push_back({"cond.W_gamma", {dh, c.lex_dim}});
      e.push_back({"cond.b_gamma", {dh}});
      e.push_back({"cond.W_beta", {dh, c.lex_dim}});
      e.push_back({"cond.b_beta", {dh}});
      break;
  }
  e.push_back({"attention.v_a", {c.score_dim()}});
  e.push_back({"classifier.W_out", {c.num_classes, dh}});
  e.push_back({"classifier.b_out", {c.num_classes}});
  return e;
}

}  // namespace

ModelParams init_params(const ModelConfig& config, std::size_t vocab_size, Rng& rng,
                        const Tensor* embeddings) {
  config.validate();
  if (vocab_size < 2) throw ConfigError("vocabulary must hold at least PAD and UNK");
  ModelParams p;
  if (embeddings != nullptr) {
    if (embeddings->shape() != Shape{vocab_size, config.embed_dim}) {
      throw ConfigError("embedding matrix " + shape_string(embeddings->shape()) +
                        " does not match vocab " + std::to_string(vocab_size) + " x " +
                        std::to_string(config.embed_dim));
    }
    p.embedding = *embeddings;
  } else {
    p.embedding = Tensor({vocab_size, config.embed_dim});
    for (std::size_t r = 1; r < vocab_size; ++r)
      for (std::size_t c = 0; c < config.embed_dim; ++c) p.embedding(r, c) = rng.uniform(-0.05, 0.05);
  }
  for (std::size_t c = 0; c < config.embed_dim; ++c) p.embedding(0, c) = 0.0;

  const std::size_t dh = config.hidden_dim;
  const std::size_t in = config.lstm_input_dim() + dh;
  p.lstm.w_input = uniform_weight(dh, in, rng);
  p.lstm.w_forget = uniform_weight(dh, in, rng);
  p.lstm.w_output = uniform_weight(dh, in, rng);
  p.lstm.w_candidate = uniform_weight(dh, in, rng);
  p.lstm.b_input = zeros(dh);
  p.lstm.b_forget = zeros(dh);
  p.lstm.b_forget.fill(1.0);
  p.lstm.b_output = zeros(dh);
  p.lstm.b_candidate = zeros(dh);

  const std::size_t lex = config.lex_dim;
  switch (conditioning_of(config.variant)) {
    case Conditioning::kNone:
      p.attention.w = uniform_weight(config.attn_dim, dh, rng);
      p.attention.b = zeros(config.attn_dim);
      break;
    case Conditioning::kConcat:
      p.conditioning.w_concat = uniform_weight(config.attn_dim, dh + lex, rng);
      p.conditioning.b_concat = zeros(config.attn_dim);
      break;
    case Conditioning::kGate:
      p.conditioning.w_gate = uniform_weight(dh, lex, rng);
      p.conditioning.b_gate = zeros(dh);
      break;
    case Conditioning::kAffine:
      p.conditioning.w_gamma = uniform_weight(dh, lex, rng);
      p.conditioning.b_gamma = zeros(dh);
      p.conditioning.w_beta = uniform_weight(dh, lex, rng);
      p.conditioning.b_beta = zeros(dh);
      break;
  }
  p.attention.v = uniform_vector(config.score_dim(), rng);
  p.classifier.w = uniform_weight(config.num_classes, dh, rng);
  p.classifier.b = zeros(config.num_classes);
  return p;
}

void check_params(const ModelConfig& config, const ModelParams& params) {
  config.validate();
  const auto expected = expected_shapes(config, params.embedding.rows());
  const auto actual = params.named();
  if (params.embedding.rank() != 2) throw ConfigError("embedding must be a matrix");
  for (const auto& e : expected) {
    const auto it = std::find_if(actual.begin(), actual.end(),
                                 [&](const auto& a) { return a.first == e.name; });
    if (it == actual.end()) {
      throw ConfigError("variant " + std::string(to_string(config.variant)) +
                        " needs parameter " + e.name);
    }
    if (it->second->shape() != e.shape) {
      throw ConfigError("parameter " + e.name + " has shape " + shape_string(it->second->shape()) +
                        ", expected " + shape_string(e.shape));
    }
  }
  for (const auto& a : actual) {
    const bool known = std::any_of(expected.begin(), expected.end(),
                                   [&](const auto& e) { return e.name == a.first; });
    if (!known) {
      throw ConfigError("parameter " + a.first + " does not belong to variant " +
                        std::string(to_string(config.variant)));
    }
  }
}

LstmVars bind_lstm(Tape& tape, const LstmParams& p) {
  return LstmVars{tape.variable(p.w_input),  tape.variable(p.w_forget), tape.variable(p.w_output),
                  tape.variable(p.w_candidate), tape.variable(p.b_input), tape.variable(p.b_forget),
                  tape.variable(p.b_output), tape.variable(p.b_candidate)};
}

ParamVars bind_params(Tape& tape, const ModelConfig& config, const ModelParams& params) {
  check_params(config, params);
  ParamVars vars;
  vars.attention.conditioning = conditioning_of(config.variant);
  const std::vector<std::pair<std::string, Var*>> slots = {
      {"embedding", &vars.embedding},
      {"lstm.W_i", &vars.lstm.w_input},
      {"lstm.W_f", &vars.lstm.w_forget},
      {"lstm.W_o", &vars.lstm.w_output},
      {"lstm.W_g", &vars.lstm.w_candidate},
      {"lstm.b_i", &vars.lstm.b_input},
      {"lstm.b_f", &vars.lstm.b_forget},
      {"lstm.b_o", &vars.lstm.b_output},
      {"lstm.b_g", &vars.lstm.b_candidate},
      {"attention.W_a", &vars.attention.w},
      {"attention.b_a", &vars.attention.b},
      {"attention.v_a", &vars.attention.v},
      {"cond.W_c", &vars.attention.w_concat},
      {"cond.b_c", &vars.attention.b_concat},
      {"cond.W_g", &vars.attention.w_gate},
      {"cond.b_g", &vars.attention.b_gate},
      {"cond.W_gamma", &vars.attention.w_gamma},
      {"cond.b_gamma", &vars.attention.b_gamma},
      {"cond.W_beta", &vars.attention.w_beta},
      {"cond.b_beta", &vars.attention.b_beta},
      {"classifier.W_out", &vars.classifier_w},
      {"classifier.b_out", &vars.classifier_b},
  };
  for (const auto& [name, tensor] : params.named()) {
    const auto slot = std::find_if(slots.begin(), slots.end(),
                                   [&](const auto& s) { return s.first == name; });
    *slot->second = tape.variable(*tensor);
    vars.all.push_back(*slot->second);
  }
  return vars;
}

LstmState lstm_step(Var x, const LstmState& state, const LstmVars& p) {
  const Var xh = ad::concat(x, state.h);
  const Var i = ad::sigmoid(ad::linear(xh, p.w_input, p.b_input));
  const Var f = ad::sigmoid(ad::linear(xh, p.w_forget, p.b_forget));
  const Var o = ad::sigmoid(ad::linear(xh, p.w_output, p.b_output));
  const Var g = ad::tanh(ad::linear(xh, p.w_candidate, p.b_candidate));
  const Var c = ad::add(ad::mul(f, state.c), ad::mul(i, g));
  const Var h = ad::mul(o, ad::tanh(c));
  return {h, c};
}

Var condition(Var h, Var c, const AttentionVars& p) {
  switch (p.conditioning) {
    case Conditioning::kNone:
      if (!p.w.valid()) throw ConfigError("unconditioned attention needs W_a and b_a");
      return ad::tanh(ad::linear(h, p.w, p.b));
    case Conditioning::kConcat:
      if (!p.w_concat.valid()) throw ConfigError("concatenation conditioning needs W_c and b_c");
      return ad::tanh(ad::linear(ad::concat(h, c), p.w_concat, p.b_concat));
    case Conditioning::kGate:
      if (!p.w_gate.valid()) throw ConfigError("gating conditioning needs W_g and b_g");
      return ad::mul(ad::sigmoid(ad::linear(c, p.w_gate, p.b_gate)), h);
    case Conditioning::kAffine: {
      if (!p.w_gamma.valid() || !p.w_beta.valid()) {
        throw ConfigError("affine conditioning needs W_gamma, b_gamma, W_beta and b_beta");
      }
      const Var gamma = ad::linear(c, p.w_gamma, p.b_gamma);
      const Var beta = ad::linear(c, p.w_beta, p.b_beta);
      return ad::add(ad::mul(gamma, h), beta);
    }
  }
  throw ConfigError("unknown conditioning");
}

Attended attend(std::span<const Var> annotations, std::span<const Var> lex,
                std::span<const std::size_t> lengths, const AttentionVars& params) {
  if (annotations.empty()) throw ContractError("attend: no timesteps");
  if (lex.size() != annotations.size()) {
    throw DimensionError("attend: " + std::to_string(lex.size()) + " lexicon steps for " +
                         std::to_string(annotations.size()) + " annotations");
  }
  Tape& tape = annotations[0].tape();
  const std::size_t batch = annotations[0].value().rows();
  const std::size_t steps = annotations.size();
  std::size_t longest = 0;
  for (std::size_t len : lengths) {
    if (len == 0) throw ContractError("attend: empty sequence");
    longest = std::max(longest, len);
  }
  longest = std::min(longest, steps);

  // Columns past the longest sequence are masked anyway; give them a
  // constant score instead of running the scorer on padding.
  std::vector<Var> scores;
  scores.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    if (t < longest) {
      scores.push_back(ad::linear(condition(annotations[t], lex[t], params), params.v));
    } else {
      scores.push_back(tape.constant(Tensor({batch, 1})));
    }
  }
  const Var weights = ad::masked_softmax(ad::concat(scores), lengths);

  Var pooled = ad::scale_rows(annotations[0], ad::slice_cols(weights, 0, 1));
  for (std::size_t t = 1; t < longest; ++t) {
    pooled = ad::add(pooled, ad::scale_rows(annotations[t], ad::slice_cols(weights, t, 1)));
  }
  return {pooled, weights};
}

Attended attend_sequence(Var annotations, Var lex, std::size_t valid_len,
                         const AttentionVars& params) {
  const std::size_t steps = annotations.value().rows();
  if (lex.value().rows() != steps) {
    throw DimensionError("attend_sequence: annotations " + shape_string(annotations.shape()) +
                         " vs lexicon features " + shape_string(lex.shape()));
  }
  std::vector<Var> h, c;
  for (std::size_t t = 0; t < steps; ++t) {
    h.push_back(ad::slice_rows(annotations, t, 1));
    c.push_back(ad::slice_rows(lex, t, 1));
  }
  const std::size_t lengths[] = {valid_len};
  if (valid_len > steps) {
    throw DimensionError("attend_sequence: valid length exceeds " + std::to_string(steps));
  }
  return attend(h, c, lengths, params);
}

ForwardResult forward(Tape& tape, const Batch& batch, const ModelParams& params,
                      const ModelConfig& config, Mode mode, Rng* rng) {
  const bool train = mode == Mode::kTrain;
  if (train && rng == nullptr && (config.noise_std > 0.0 || config.dropout > 0.0)) {
    throw ContractError("train-mode forward needs an Rng");
  }
  if (batch.size == 0 || batch.max_len == 0) throw ContractError("forward: empty batch");
  const bool needs_lex = config.variant != Variant::kBaseline;
  if (needs_lex && batch.lex_dim != config.lex_dim) {
    throw ConfigError("batch carries " + std::to_string(batch.lex_dim) +
                      " lexicon dims, model expects " + std::to_string(config.lex_dim));
  }
  for (std::size_t len : batch.lengths) {
    if (len == 0 || len > batch.max_len) throw ContractError("forward: invalid sequence length");
  }
  for (std::int32_t label : batch.labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= config.num_classes) {
      throw ConfigError("batch label " + std::to_string(label) + " outside " +
                        std::to_string(config.num_classes) + " classes");
    }
  }

  ForwardResult out;
  out.params = bind_params(tape, config, params);
  const ParamVars& p = out.params;
  const std::size_t B = batch.size, T = batch.max_len, dh = config.hidden_dim;
  const std::size_t L = needs_lex ? config.lex_dim : 0;
  const std::size_t longest = *std::max_element(batch.lengths.begin(), batch.lengths.end());

  Tensor shared_mask;
  const bool dropout_on = train && config.dropout > 0.0;
  const double keep_scale = 1.0 / (1.0 - config.dropout);
  auto draw_mask = [&] {
    Tensor m({B, dh});
    for (double& v : m.data()) v = rng->bernoulli(config.dropout) ? 0.0 : keep_scale;
    return m;
  };
  if (dropout_on && config.shared_dropout_mask) shared_mask = draw_mask();

  LstmState state{tape.constant(Tensor({B, dh})), tape.constant(Tensor({B, dh}))};
  std::vector<Var> annotations, lex_steps;
  std::vector<std::int32_t> ids(B);
  for (std::size_t t = 0; t < longest; ++t) {
    for (std::size_t b = 0; b < B; ++b) ids[b] = batch.token(b, t);
    Var x = ad::gather_rows(p.embedding, ids);
    if (train && config.noise_std > 0.0) {
      Tensor noise({B, config.embed_dim});
      for (double& v : noise.data()) v = rng->normal(0.0, config.noise_std);
      x = ad::add(x, tape.constant(std::move(noise)));
    }
    Tensor lex_t({B, L});
    for (std::size_t b = 0; b < B && L > 0; ++b) {
      const auto feats = batch.lex(b, t);
      std::copy(feats.begin(), feats.end(), &lex_t(b, 0));
    }
    const Var lex_var = tape.constant(std::move(lex_t));
    if (concatenates_to_embeddings(config.variant)) x = ad::concat(x, lex_var);

    state = lstm_step(x, state, p.lstm);
    Var h = state.h;
    if (dropout_on) {
      h = ad::mul(h, tape.constant(config.shared_dropout_mask ? shared_mask : draw_mask()));
    }
    annotations.push_back(h);
    lex_steps.push_back(lex_var);
  }
  // Padding columns beyond the longest sequence only widen the weight matrix.
  for (std::size_t t = longest; t < T; ++t) {
    annotations.push_back(annotations.back());
    lex_steps.push_back(lex_steps.back());
  }

  const Attended att = attend(annotations, lex_steps, batch.lengths, p.attention);
  out.logits = ad::linear(att.pooled, p.classifier_w, p.classifier_b);
  out.attention = att.weights;
  return out;
}

}  // namespace lexattn
