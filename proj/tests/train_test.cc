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

#include "lexattn/train.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "lexattn/errors.h"
#include "lexattn/synthetic.h"
#include "testing.h"

namespace lexattn {
namespace {

TEST(ClipTest, ScalesAboveThreshold) {
  std::vector<Tensor> g = {Tensor::vector({3, 4})};
  EXPECT_EQ(clip_global_norm(g, 0.5), 5.0);
  EXPECT_NEAR(g[0][0], 0.3, 1e-15);
  EXPECT_NEAR(g[0][1], 0.4, 1e-15);
}

TEST(ClipTest, LeavesSmallAndZeroGradients) {
  std::vector<Tensor> g = {Tensor::vector({0.24, 0.32})};
  clip_global_norm(g, 0.5);
  EXPECT_EQ(g[0], Tensor::vector({0.24, 0.32}));
  std::vector<Tensor> z = {Tensor({2, 2}), Tensor({3})};
  EXPECT_EQ(clip_global_norm(z, 0.5), 0.0);
  for (const auto& t : z)
    for (double v : t.data()) EXPECT_EQ(v, 0.0);
}

TEST(ClipTest, NormIsJointAcrossTensors) {
  std::vector<Tensor> g = {Tensor::vector({3}), Tensor::matrix({{4}})};
  EXPECT_EQ(clip_global_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g[0][0], 0.6, 1e-15);
  EXPECT_NEAR(g[1][0], 0.8, 1e-15);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Tensor theta = Tensor::scalar(2.0);
  Tensor* params[] = {&theta};
  const Tensor grads[] = {Tensor::scalar(1.0)};
  AdamState state;
  TrainConfig config;
  config.lr = 0.1;
  adam_step(params, grads, state, config);
  EXPECT_NEAR(theta.item(), 1.9, 1e-7);
  EXPECT_EQ(state.step, 1u);
}

TEST(AdamTest, ZeroGradientLeavesParams) {
  Tensor theta = Tensor::vector({1, -2});
  Tensor* params[] = {&theta};
  const Tensor grads[] = {Tensor({2})};
  AdamState state;
  adam_step(params, grads, state, TrainConfig{});
  EXPECT_EQ(theta, Tensor::vector({1, -2}));
}

TEST(AdamTest, QuadraticDescentIsMonotone) {
  Tensor theta = Tensor::scalar(1.0);
  Tensor* params[] = {&theta};
  AdamState state;
  TrainConfig config;
  config.lr = 0.05;
  double previous = 1.0;
  for (int step = 0; step < 20; ++step) {
    const Tensor grads[] = {Tensor::scalar(2.0 * theta.item())};
    adam_step(params, grads, state, config);
    EXPECT_LT(std::abs(theta.item()), previous);
    previous = std::abs(theta.item());
  }
}

TEST(AdamTest, FrozenFirstRowAndShapeChecks) {
  Tensor emb = Tensor::matrix({{0, 0}, {1, 1}});
  Tensor* params[] = {&emb};
  const Tensor grads[] = {Tensor::matrix({{5, 5}, {1, 1}})};
  const bool freeze[] = {true};
  AdamState state;
  adam_step(params, grads, state, TrainConfig{}, freeze);
  EXPECT_EQ(emb(0, 0), 0.0);
  EXPECT_EQ(emb(0, 1), 0.0);
  EXPECT_LT(emb(1, 0), 1.0);
  const Tensor bad[] = {Tensor({3})};
  EXPECT_THROW(adam_step(params, bad, state, TrainConfig{}), ContractError);
  const Tensor none[1] = {};
  std::span<const Tensor> empty(none, 0);
  EXPECT_THROW(adam_step(params, empty, state, TrainConfig{}), ContractError);
}

TEST(EarlyStoppingTest, RuleTrace) {
  EarlyStopping s(2);
  const double metrics[] = {0.5, 0.6, 0.6, 0.55};
  std::size_t stopped_after = 0;
  for (double m : metrics) {
    s.update(m);
    if (s.should_stop()) {
      stopped_after = s.epochs();
      break;
    }
  }
  EXPECT_EQ(stopped_after, 4u);
  EXPECT_EQ(s.best_epoch(), 2u);
  EXPECT_EQ(s.best_metric(), 0.6);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.lr = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.clip_norm = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrainConfig{};
  c.patience = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

// Small synthetic setup shared by the loop tests.
struct Toy {
  std::vector<EncodedExample> train, val;
  Vocabulary vocab;
  LexiconFeatureTable table;
  LabelMap labels;
};

Toy make_toy(std::size_t train_size, std::uint64_t seed = 3) {
  SyntheticSpec spec;
  spec.signal_train_vocab = 40;
  spec.signal_test_vocab = 40;
  spec.noise_vocab = 30;
  spec.min_len = 4;
  spec.max_len = 8;
  spec.train_size = train_size;
  spec.val_size = 32;
  spec.test_size = 1;
  spec.seed = seed;
  const SyntheticCorpus corpus = generate(spec);
  Toy toy;
  toy.labels = LabelMap::from_examples(corpus.train);
  toy.labels.add(kPositiveLabel);
  toy.labels.add(kNegativeLabel);
  toy.train = encode_examples(corpus.train, toy.labels);
  toy.val = encode_examples(corpus.val, toy.labels);
  std::vector<std::vector<std::string>> tokens;
  for (const auto& e : toy.train) tokens.push_back(e.tokens);
  toy.vocab = Vocabulary::build(tokens);
  std::vector<ParsedLexicon> lex = {
      parse_lexicon_text(corpus.lexicon_tsv, LexiconSpec{"synth", 4, "", LexiconValueKind::kScalar})};
  toy.table = build_feature_table(lex);
  return toy;
}

ModelConfig toy_model(Variant v) {
  ModelConfig c;
  c.variant = v;
  c.embed_dim = 8;
  c.hidden_dim = 8;
  c.attn_dim = 8;
  c.lex_dim = 4;
  c.num_classes = 2;
  return c;
}

TEST(TrainLoopTest, DeterministicHistoryAndParams) {
  const Toy toy = make_toy(96);
  const ModelConfig mc = toy_model(Variant::kAttnAffine);
  TrainConfig tc;
  tc.batch_size = 16;
  tc.max_epochs = 3;
  tc.seed = 11;
  auto run = [&] {
    Rng rng(tc.seed);
    return train(mc, init_params(mc, toy.vocab.size(), rng), {toy.train, toy.val, &toy.vocab, &toy.table}, tc);
  };
  const TrainResult a = run();
  const TrainResult b = run();
  EXPECT_EQ(format_history(a), format_history(b));
  const auto pa = a.best_params.named();
  const auto pb = b.best_params.named();
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i].second, *pb[i].second);
  EXPECT_EQ(a.history.size(), 3u);
}

TEST(TrainLoopTest, BestCheckpointNeverWorseThanEarlierEpochs) {
  const Toy toy = make_toy(64);
  const ModelConfig mc = toy_model(Variant::kAttnGate);
  TrainConfig tc;
  tc.batch_size = 8;
  tc.max_epochs = 6;
  tc.patience = 2;
  tc.lr = 0.01;
  Rng rng(1);
  std::size_t callbacks = 0;
  const TrainResult r = train(mc, init_params(mc, toy.vocab.size(), rng),
                              {toy.train, toy.val, &toy.vocab, &toy.table}, tc,
                              [&](const EpochRecord&) { ++callbacks; });
  EXPECT_EQ(callbacks, r.history.size());
  for (std::size_t e = 0; e < r.best_epoch; ++e) {
    EXPECT_LE(r.history[e].val_metric, r.best_metric);
  }
  EXPECT_EQ(r.history[r.best_epoch - 1].val_metric, r.best_metric);
  // The returned parameters score best_metric on validation.
  const auto preds = predict(mc, r.best_params, toy.val, toy.vocab, toy.table);
  EXPECT_EQ(metric_value(confusion(preds, 2), tc.eval_metric), r.best_metric);
}

TEST(TrainLoopTest, FirstBatchLossDecreasesOverFiveSteps) {
  const Toy toy = make_toy(64);
  const ModelConfig mc = toy_model(Variant::kAttnGate);
  TrainConfig tc;  // lr 1e-3
  Rng rng(2);
  ModelParams params = init_params(mc, toy.vocab.size(), rng);
  const Batch batch = make_batches(toy.train, toy.vocab, toy.table, 64, std::nullopt)[0];
  auto eval_loss = [&] { return testing::model_loss(batch, params, mc, Mode::kEval, 0); };
  AdamState adam;
  Rng noise(3);
  std::vector<Tensor*> slots;
  for (auto& [name, t] : params.named()) slots.push_back(t);
  double previous = eval_loss();
  for (int step = 0; step < 5; ++step) {
    Tape tape;
    const ForwardResult fr = forward(tape, batch, params, mc, Mode::kTrain, &noise);
    const Gradients g = tape.backward(ad::softmax_cross_entropy(fr.logits, batch.labels));
    std::vector<Tensor> grads;
    for (const Var& v : fr.params.all) grads.push_back(g[v]);
    clip_global_norm(grads, tc.clip_norm);
    adam_step(slots, grads, adam, tc);
    const double now = eval_loss();
    EXPECT_LT(now, previous) << "step " << step;
    previous = now;
  }
}

TEST(TrainLoopTest, NonFiniteLossAborts) {
  const Toy toy = make_toy(32);
  const ModelConfig mc = toy_model(Variant::kBaseline);
  Rng rng(1);
  ModelParams params = init_params(mc, toy.vocab.size(), rng);
  params.classifier.b[0] = std::numeric_limits<double>::quiet_NaN();
  TrainConfig tc;
  tc.max_epochs = 1;
  try {
    train(mc, params, {toy.train, toy.val, &toy.vocab, &toy.table}, tc);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("nan"), std::string::npos) << msg;
  }
}

TEST(TrainLoopTest, EmptySplitsRejected) {
  const Toy toy = make_toy(16);
  const ModelConfig mc = toy_model(Variant::kBaseline);
  Rng rng(1);
  const ModelParams p = init_params(mc, toy.vocab.size(), rng);
  EXPECT_THROW(train(mc, p, {{}, toy.val, &toy.vocab, &toy.table}, TrainConfig{}), ContractError);
  EXPECT_THROW(train(mc, p, {toy.train, {}, &toy.vocab, &toy.table}, TrainConfig{}), ContractError);
}

TEST(PredictTest, KeepsInputOrderAndValidAttention) {
  const Toy toy = make_toy(40);
  const ModelConfig mc = toy_model(Variant::kAttnConc);
  Rng rng(1);
  const ModelParams p = init_params(mc, toy.vocab.size(), rng);
  const Predictions preds = predict(mc, p, toy.train, toy.vocab, toy.table, 7);
  ASSERT_EQ(preds.gold.size(), toy.train.size());
  for (std::size_t i = 0; i < toy.train.size(); ++i) {
    EXPECT_EQ(preds.gold[i], toy.train[i].label);
    ASSERT_EQ(preds.attention[i].size(), toy.train[i].tokens.size());
    double s = 0.0;
    for (double a : preds.attention[i]) s += a;
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_GT(preds.mean_loss, 0.0);
}

TEST(HistoryTest, Format) {
  TrainResult r;
  r.history = {{1, 0.5, 0.25}, {2, 0.125, 0.75}};
  r.best_epoch = 2;
  r.best_metric = 0.75;
  EXPECT_EQ(format_history(r), "1\t0.5\t0.25\n2\t0.125\t0.75\nbest\t2\t0.75\n");
}

TEST(SeedSummaryTest, MeanAndSampleStd) {
  const std::uint64_t seeds[] = {1, 2, 3};
  const double metrics[] = {0.5, 0.75, 1.0};
  const SeedSummary s = summarize_seeds(seeds, metrics);
  EXPECT_DOUBLE_EQ(s.mean, 0.75);
  EXPECT_DOUBLE_EQ(s.stddev, 0.25);
  EXPECT_EQ(format_seed_summary(s, "accuracy"),
            "seed\taccuracy\n1\t0.5\n2\t0.75\n3\t1\nmean\t0.75\tstd\t0.25\n");
  const std::uint64_t one[] = {4};
  const double m1[] = {0.5};
  EXPECT_EQ(summarize_seeds(one, m1).stddev, 0.0);
  EXPECT_THROW(summarize_seeds(seeds, m1), ContractError);
}

}  // namespace
}  // namespace lexattn
