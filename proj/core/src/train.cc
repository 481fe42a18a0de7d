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

#include <algorithm>
#include <cmath>
#include <memory>

#include "lexattn/autodiff.h"
#include "lexattn/errors.h"
#include "lexattn/rng.h"
#include "lexattn/util.h"

namespace lexattn {

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (!(clip_norm > 0.0)) throw ConfigError("clip_norm must be > 0");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
}

double clip_global_norm(std::span<Tensor> grads, double max_norm) {
  double total = 0.0;
  for (const auto& g : grads) total += squared_norm(g);
  const double norm = std::sqrt(total);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& g : grads)
      for (double& v : g.data()) v *= scale;
  }
  return norm;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads, AdamState& state,
               const TrainConfig& config, std::span<const bool> freeze_first_row) {
  if (params.size() != grads.size()) {
    throw ContractError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                        std::to_string(grads.size()) + " gradients");
  }
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.push_back(Tensor::zeros_like(*p));
      state.v.push_back(Tensor::zeros_like(*p));
    }
  }
  if (state.m.size() != params.size()) throw ContractError("adam_step: state/parameter count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k]->shape() != grads[k].shape() || state.m[k].shape() != grads[k].shape()) {
      throw ContractError("adam_step: shape mismatch on parameter " + std::to_string(k) + ": " +
                          shape_string(params[k]->shape()) + " vs gradient " +
                          shape_string(grads[k].shape()));
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto p = params[k]->data();
    const auto g = grads[k].data();
    auto m = state.m[k].data();
    auto v = state.v[k].data();
    const std::size_t start =
        k < freeze_first_row.size() && freeze_first_row[k] ? params[k]->cols() : 0;
    for (std::size_t i = start; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.lr * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

bool EarlyStopping::update(double metric) {
  ++epochs_;
  if (epochs_ == 1 || metric > best_metric_) {
    best_metric_ = metric;
    best_epoch_ = epochs_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

Predictions predict(const ModelConfig& model_config, const ModelParams& params,
                    std::span<const EncodedExample> examples, const Vocabulary& vocab,
                    const LexiconFeatureTable& table, std::size_t batch_size) {
  Predictions out;
  out.gold.resize(examples.size());
  out.predicted.resize(examples.size());
  out.attention.resize(examples.size());
  if (examples.empty()) return out;
  const auto batches = make_batches(examples, vocab, table, batch_size, std::nullopt);
  double loss_sum = 0.0;
  std::size_t offset = 0;
  for (const Batch& batch : batches) {
    Tape tape;
    const ForwardResult fr = forward(tape, batch, params, model_config, Mode::kEval);
    loss_sum += ad::softmax_cross_entropy(fr.logits, batch.labels).value().item() *
                static_cast<double>(batch.size);
    const Tensor& logits = fr.logits.value();
    const Tensor& attn = fr.attention.value();
    for (std::size_t b = 0; b < batch.size; ++b) {
      const std::size_t i = offset + b;
      out.gold[i] = batch.labels[b];
      std::size_t best = 0;
      for (std::size_t c = 1; c < logits.cols(); ++c) {
        if (logits(b, c) > logits(b, best)) best = c;
      }
      out.predicted[i] = static_cast<std::int32_t>(best);
      out.attention[i].resize(batch.lengths[b]);
      for (std::size_t t = 0; t < batch.lengths[b]; ++t) out.attention[i][t] = attn(b, t);
    }
    offset += batch.size;
  }
  out.mean_loss = loss_sum / static_cast<double>(examples.size());
  return out;
}

ConfusionMatrix confusion(const Predictions& predictions, std::size_t num_classes) {
  return ConfusionMatrix::from_predictions(num_classes, predictions.gold, predictions.predicted);
}

TrainResult train(const ModelConfig& model_config, ModelParams params, const TrainData& data,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  model_config.validate();
  if (data.train.empty()) throw ContractError("training split is empty");
  if (data.val.empty()) throw ContractError("validation split is empty");
  if (data.vocab == nullptr || data.table == nullptr) {
    throw ContractError("training needs a vocabulary and a lexicon table");
  }
  check_params(model_config, params);

  TrainResult result;
  result.best_params = params;
  EarlyStopping stopper(config.patience);
  AdamState adam;
  Rng noise_rng(mix_seed(config.seed, 0x5eed));

  const auto named = params.named();
  std::vector<Tensor*> slots;
  auto freeze = std::make_unique<bool[]>(named.size());
  for (std::size_t k = 0; k < named.size(); ++k) {
    slots.push_back(named[k].second);
    freeze[k] = named[k].first == "embedding";
  }

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches = make_batches(data.train, *data.vocab, *data.table, config.batch_size,
                                      mix_seed(config.seed, epoch));
    double loss_sum = 0.0;
    for (std::size_t k = 0; k < batches.size(); ++k) {
      const Batch& batch = batches[k];
      Tape tape;
      const ForwardResult fr = forward(tape, batch, params, model_config, Mode::kTrain, &noise_rng);
      const Var loss = ad::softmax_cross_entropy(fr.logits, batch.labels);
      const double loss_value = loss.value().item();
      if (!std::isfinite(loss_value)) {
        throw NumericError("non-finite loss " + format_double(loss_value) + " at epoch " +
                           std::to_string(epoch) + ", batch " + std::to_string(k + 1));
      }
      loss_sum += loss_value * static_cast<double>(batch.size);
      const Gradients grads = tape.backward(loss);
      std::vector<Tensor> g;
      g.reserve(fr.params.all.size());
      for (const Var& v : fr.params.all) g.push_back(grads[v]);
      clip_global_norm(g, config.clip_norm);
      adam_step(slots, g, adam, config, std::span<const bool>(freeze.get(), named.size()));
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(data.train.size());
    const Predictions val =
        predict(model_config, params, data.val, *data.vocab, *data.table, config.batch_size);
    record.val_metric = metric_value(confusion(val, model_config.num_classes), config.eval_metric);
    result.history.push_back(record);
    if (stopper.update(record.val_metric)) result.best_params = params;
    if (on_epoch) on_epoch(record);
    if (stopper.should_stop()) break;
  }
  result.best_epoch = stopper.best_epoch();
  result.best_metric = stopper.best_metric();
  return result;
}

std::string format_history(const TrainResult& result) {
  std::string out;
  for (const auto& r : result.history) {
    out += std::to_string(r.epoch) + '\t' + format_double(r.train_loss) + '\t' +
           format_double(r.val_metric) + '\n';
  }
  out += "best\t" + std::to_string(result.best_epoch) + '\t' + format_double(result.best_metric) +
         '\n';
  return out;
}

SeedSummary summarize_seeds(std::span<const std::uint64_t> seeds, std::span<const double> metrics) {
  if (seeds.size() != metrics.size() || seeds.empty()) {
    throw ContractError("seed summary needs one metric per seed");
  }
  SeedSummary s;
  s.seeds.assign(seeds.begin(), seeds.end());
  s.metrics.assign(metrics.begin(), metrics.end());
  double sum = 0.0;
  for (double m : metrics) sum += m;
  s.mean = sum / static_cast<double>(metrics.size());
  if (metrics.size() > 1) {
    double sq = 0.0;
    for (double m : metrics) sq += (m - s.mean) * (m - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(metrics.size() - 1));
  }
  return s;
}

std::string format_seed_summary(const SeedSummary& summary, std::string_view metric_name) {
  std::string out = "seed\t" + std::string(metric_name) + '\n';
  for (std::size_t i = 0; i < summary.seeds.size(); ++i) {
    out += std::to_string(summary.seeds[i]) + '\t' + format_double(summary.metrics[i]) + '\n';
  }
  out += "mean\t" + format_double(summary.mean) + "\tstd\t" + format_double(summary.stddev) + '\n';
  return out;
}

}  // namespace lexattn
