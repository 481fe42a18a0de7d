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

#include <benchmark/benchmark.h>

#include "lexattn/autodiff.h"
#include "lexattn/model.h"
#include "lexattn/rng.h"
#include "lexattn/tensor.h"
#include "lexattn/text.h"
#include "lexattn/train.h"

namespace lexattn {
namespace {

constexpr std::size_t kVocab = 500;

Batch make_batch(Rng& rng, std::size_t size, std::size_t len, std::size_t lex_dim) {
  Batch b;
  b.size = size;
  b.max_len = len;
  b.lex_dim = lex_dim;
  b.tokens.resize(size * len);
  b.lex_feats.resize(size * len * lex_dim);
  for (auto& t : b.tokens) t = static_cast<std::int32_t>(2 + rng.index(kVocab - 2));
  for (auto& f : b.lex_feats) f = rng.uniform(-1.0, 1.0);
  for (std::size_t i = 0; i < size; ++i) {
    b.lengths.push_back(len);
    b.labels.push_back(static_cast<std::int32_t>(rng.index(2)));
    b.example_ids.push_back(i);
  }
  return b;
}

ModelConfig bench_config(Variant v, std::size_t d) {
  ModelConfig c;
  c.variant = v;
  c.embed_dim = d;
  c.hidden_dim = d;
  c.attn_dim = d;
  c.lex_dim = 8;
  return c;
}

// args: variant index, hidden size
void BM_ForwardBackward(benchmark::State& state) {
  const ModelConfig config =
      bench_config(kAllVariants[state.range(0)], static_cast<std::size_t>(state.range(1)));
  Rng rng(1);
  const ModelParams params = init_params(config, kVocab, rng);
  const Batch batch = make_batch(rng, 64, 20, config.lex_dim);
  for (auto _ : state) {
    Tape tape;
    const ForwardResult fr = forward(tape, batch, params, config, Mode::kTrain, &rng);
    const Gradients g = tape.backward(ad::softmax_cross_entropy(fr.logits, batch.labels));
    benchmark::DoNotOptimize(g[fr.params.all.front()]);
  }
  state.SetLabel(std::string(to_string(config.variant)));
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_ForwardBackward)
    ->ArgsProduct({{0, 1, 2, 3, 4, 5}, {32}})
    ->Args({3, 64})
    ->Unit(benchmark::kMillisecond);

void BM_ForwardEval(benchmark::State& state) {
  const ModelConfig config = bench_config(Variant::kAttnGate, 32);
  Rng rng(2);
  const ModelParams params = init_params(config, kVocab, rng);
  const Batch batch = make_batch(rng, 64, static_cast<std::size_t>(state.range(0)), config.lex_dim);
  for (auto _ : state) {
    Tape tape;
    benchmark::DoNotOptimize(forward(tape, batch, params, config, Mode::kEval).logits.value());
  }
}
BENCHMARK(BM_ForwardEval)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  Tensor a({n, n}), b({n, n});
  for (double& v : a.data()) v = rng.uniform(-1.0, 1.0);
  for (double& v : b.data()) v = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    Tape tape;
    benchmark::DoNotOptimize(ad::matmul(tape.constant(a), tape.constant(b)).value());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(128);

void BM_ClipAndAdam(benchmark::State& state) {
  const ModelConfig config = bench_config(Variant::kAttnAffine, 64);
  Rng rng(4);
  ModelParams params = init_params(config, kVocab, rng);
  std::vector<Tensor*> ptrs;
  std::vector<Tensor> grads;
  for (auto& [name, t] : params.named()) {
    ptrs.push_back(t);
    grads.push_back(Tensor::zeros_like(*t));
    for (double& v : grads.back().data()) v = rng.uniform(-1.0, 1.0);
  }
  AdamState adam;
  TrainConfig tc;
  for (auto _ : state) {
    std::vector<Tensor> g = grads;
    clip_global_norm(g, tc.clip_norm);
    adam_step(ptrs, g, adam, tc);
  }
}
BENCHMARK(BM_ClipAndAdam)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lexattn

BENCHMARK_MAIN();
