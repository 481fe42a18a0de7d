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

#ifndef LEXATTN_TRAIN_H_
#define LEXATTN_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lexattn/lexicon.h"
#include "lexattn/metrics.h"
#include "lexattn/model.h"
#include "lexattn/tensor.h"
#include "lexattn/text.h"

namespace lexattn {

struct TrainConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 0.5;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;
  std::uint64_t seed = 1;
  Metric eval_metric = Metric::kMacroF1;

  void validate() const;
};

// Scales every gradient by max_norm / g when the joint L2 norm g over all
// tensors exceeds max_norm. Returns g.
double clip_global_norm(std::span<Tensor> grads, double max_norm);

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update. `state` is sized on first use. Row 0 of
// params[k] is left untouched when freeze_first_row[k] is set (the PAD
// embedding).
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const TrainConfig& config, std::span<const bool> freeze_first_row = {});

// Patience-based early stopping on a metric where larger is better. Ties
// keep the earlier epoch.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

  // Feeds the next epoch's metric; true when it is a new best.
  bool update(double metric);
  bool should_stop() const { return epochs_ > 0 && since_best_ >= patience_; }
  std::size_t best_epoch() const { return best_epoch_; }
  double best_metric() const { return best_metric_; }
  std::size_t epochs() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t since_best_ = 0;
  std::size_t best_epoch_ = 0;
  double best_metric_ = 0.0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_metric = 0.0;
};

struct TrainResult {
  ModelParams best_params;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_metric = 0.0;
};

struct TrainData {
  std::span<const EncodedExample> train;
  std::span<const EncodedExample> val;
  const Vocabulary* vocab = nullptr;
  const LexiconFeatureTable* table = nullptr;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Seeded shuffle, forward/backward, global clipping and Adam per batch;
// validation metric per epoch; returns the best-metric parameters. Throws
// NumericError on a non-finite loss.
TrainResult train(const ModelConfig& model_config, ModelParams params, const TrainData& data,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

struct Predictions {
  std::vector<std::int32_t> gold;
  std::vector<std::int32_t> predicted;
  // Attention over the valid tokens of each example.
  std::vector<std::vector<double>> attention;
  double mean_loss = 0.0;
};

// Eval-mode inference, results in input order.
Predictions predict(const ModelConfig& model_config, const ModelParams& params,
                    std::span<const EncodedExample> examples, const Vocabulary& vocab,
                    const LexiconFeatureTable& table, std::size_t batch_size = 64);

ConfusionMatrix confusion(const Predictions& predictions, std::size_t num_classes);

// `epoch<TAB>train_loss<TAB>val_metric` lines and a closing
// `best<TAB>best_epoch<TAB>best_metric` line.
std::string format_history(const TrainResult& result);

struct SeedSummary {
  std::vector<std::uint64_t> seeds;
  std::vector<double> metrics;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single seed
};

SeedSummary summarize_seeds(std::span<const std::uint64_t> seeds, std::span<const double> metrics);
// `seed<TAB>metric` lines and a closing `mean<TAB>m<TAB>std<TAB>s` line.
std::string format_seed_summary(const SeedSummary& summary, std::string_view metric_name);

}  // namespace lexattn

#endif  // LEXATTN_TRAIN_H_
