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

#ifndef LEXATTN_MODEL_H_
#define LEXATTN_MODEL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexattn/autodiff.h"
#include "lexattn/rng.h"
#include "lexattn/tensor.h"
#include "lexattn/text.h"

namespace lexattn {

enum class Variant {
  kBaseline,
  kEmbConc,
  kAttnConc,
  kAttnGate,
  kAttnAffine,
  kGatePlusEmbConc,
};

inline constexpr Variant kAllVariants[] = {
    Variant::kBaseline,  Variant::kEmbConc,    Variant::kAttnConc,
    Variant::kAttnGate,  Variant::kAttnAffine, Variant::kGatePlusEmbConc,
};

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);

// How the attention input f(h_i, c(w_i)) is formed.
enum class Conditioning {
  kNone,    // tanh(W_a h + b_a)
  kConcat,  // tanh(W_c [h ; c] + b_c)
  kGate,    // sigmoid(W_g c + b_g) * h
  kAffine,  // (W_gamma c + b_gamma) * h + (W_beta c + b_beta)
};

Conditioning conditioning_of(Variant variant);
// Lexicon features concatenated to the word embeddings before the LSTM.
bool concatenates_to_embeddings(Variant variant);

struct ModelConfig {
  Variant variant = Variant::kBaseline;
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 300;
  std::size_t attn_dim = 300;
  std::size_t lex_dim = 0;
  std::size_t num_classes = 2;
  double dropout = 0.2;
  double noise_std = 0.1;
  // One dropout mask per sequence instead of one per timestep.
  bool shared_dropout_mask = false;

  void validate() const;
  std::size_t lstm_input_dim() const;
  // Width of f(.) and therefore of v_a.
  std::size_t score_dim() const;
};

struct LstmParams {
  // d_h x (input_dim + d_h) each, applied to [x ; h].
  Tensor w_input, w_forget, w_output, w_candidate;
  Tensor b_input, b_forget, b_output, b_candidate;
};

struct AttentionParams {
  Tensor w;  // d_a x d_h; only for unconditioned attention
  Tensor b;  // d_a
  Tensor v;  // score_dim
};

// Only the tensors of the active conditioning are non-empty.
struct ConditioningParams {
  Tensor w_concat, b_concat;
  Tensor w_gate, b_gate;
  Tensor w_gamma, b_gamma, w_beta, b_beta;
};

struct ClassifierParams {
  Tensor w;  // num_classes x d_h
  Tensor b;  // num_classes
};

struct ModelParams {
  Tensor embedding;  // |V| x embed_dim, row 0 is PAD
  LstmParams lstm;
  AttentionParams attention;
  ConditioningParams conditioning;
  ClassifierParams classifier;

  // Non-empty parameters in a fixed order with stable names.
  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;
  // Slot for `name` whether or not it is populated; nullptr for unknown names.
  Tensor* find(std::string_view name);

 private:
  std::vector<std::pair<std::string, Tensor*>> slots();
};

// uniform(-k, k) with k = 1/sqrt(fan_in) for weights, zero biases except
// the LSTM forget gate (1.0). Embeddings come from `embeddings` when given.
ModelParams init_params(const ModelConfig& config, std::size_t vocab_size, Rng& rng,
                        const Tensor* embeddings = nullptr);

// Throws ConfigError unless every tensor the variant needs is present with
// the right shape and no foreign conditioning tensors exist.
void check_params(const ModelConfig& config, const ModelParams& params);

// Parameters recorded as tape variables.
struct LstmVars {
  Var w_input, w_forget, w_output, w_candidate;
  Var b_input, b_forget, b_output, b_candidate;
};

struct AttentionVars {
  Conditioning conditioning = Conditioning::kNone;
  Var w, b, v;
  Var w_concat, b_concat;
  Var w_gate, b_gate;
  Var w_gamma, b_gamma, w_beta, b_beta;
};

struct ParamVars {
  Var embedding;
  LstmVars lstm;
  AttentionVars attention;
  Var classifier_w, classifier_b;
  // Aligned with ModelParams::named().
  std::vector<Var> all;
};

ParamVars bind_params(Tape& tape, const ModelConfig& config, const ModelParams& params);
LstmVars bind_lstm(Tape& tape, const LstmParams& params);

struct LstmState {
  Var h;
  Var c;
};

// One LSTM step on a batch: x[B x input_dim], h and c [B x d_h].
LstmState lstm_step(Var x, const LstmState& state, const LstmVars& params);

// f(h, c) for rows of h[B x d_h] and c[B x lex_dim].
Var condition(Var h, Var c, const AttentionVars& params);

struct Attended {
  Var pooled;   // r, [B x d_h]
  Var weights;  // a, [B x T]
};

// Scores each annotation with v_a . f(h_t, c_t), normalises over the valid
// prefix of every row and pools the unconditioned annotations.
Attended attend(std::span<const Var> annotations, std::span<const Var> lex,
                std::span<const std::size_t> lengths, const AttentionVars& params);

// Single sequence: rows of annotations[T x d_h] and lex[T x lex_dim] are
// timesteps. pooled is [1 x d_h], weights [1 x T].
Attended attend_sequence(Var annotations, Var lex, std::size_t valid_len,
                         const AttentionVars& params);

enum class Mode { kTrain, kEval };

struct ForwardResult {
  Var logits;     // B x num_classes
  Var attention;  // B x T_max
  ParamVars params;
};

// `rng` drives embedding noise and dropout; only used in train mode.
ForwardResult forward(Tape& tape, const Batch& batch, const ModelParams& params,
                      const ModelConfig& config, Mode mode, Rng* rng = nullptr);

}  // namespace lexattn

#endif  // LEXATTN_MODEL_H_
