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

#include "lexattn/metrics.h"

#include "lexattn/errors.h"

namespace lexattn {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : n_(num_classes), counts_(num_classes * num_classes, 0) {}

ConfusionMatrix ConfusionMatrix::from_predictions(std::size_t num_classes,
                                                  std::span<const std::int32_t> gold,
                                                  std::span<const std::int32_t> predicted) {
  if (gold.size() != predicted.size()) {
    throw ContractError("confusion matrix: " + std::to_string(gold.size()) + " gold vs " +
                        std::to_string(predicted.size()) + " predicted labels");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    cm.add(static_cast<std::size_t>(gold[i]), static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted, std::size_t count) {
  if (gold >= n_ || predicted >= n_) {
    throw ContractError("confusion matrix: class index outside " + std::to_string(n_));
  }
  counts_[gold * n_ + predicted] += count;
  total_ += count;
}

std::string_view to_string(F1Average average) {
  return average == F1Average::kMacro ? "macro" : "micro";
}

F1Average parse_f1_average(std::string_view text) {
  if (text == "macro") return F1Average::kMacro;
  if (text == "micro") return F1Average::kMicro;
  throw ConfigError("unknown F1 averaging '" + std::string(text) + "'");
}

namespace {

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw ContractError("metric undefined on an empty confusion matrix");
}

}  // namespace

double accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  std::size_t trace = 0;
  for (std::size_t k = 0; k < cm.num_classes(); ++k) trace += cm(k, k);
  return static_cast<double>(trace) / static_cast<double>(cm.total());
}

double macro_f1(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  const std::size_t n = cm.num_classes();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t predicted = 0, gold = 0;
    for (std::size_t j = 0; j < n; ++j) {
      predicted += cm(j, k);
      gold += cm(k, j);
    }
    const double tp = static_cast<double>(cm(k, k));
    const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    const double recall = gold == 0 ? 0.0 : tp / static_cast<double>(gold);
    if (precision + recall > 0.0) sum += 2.0 * precision * recall / (precision + recall);
  }
  return sum / static_cast<double>(n);
}

double micro_f1(const ConfusionMatrix& cm) {
  // Single-label multi-class: micro precision = micro recall = accuracy.
  return accuracy(cm);
}

double f1_score(const ConfusionMatrix& cm, F1Average average) {
  return average == F1Average::kMacro ? macro_f1(cm) : micro_f1(cm);
}

std::string_view to_string(Metric metric) {
  return metric == Metric::kAccuracy ? "accuracy" : "macro_f1";
}

Metric parse_metric(std::string_view text) {
  if (text == "accuracy") return Metric::kAccuracy;
  if (text == "macro_f1") return Metric::kMacroF1;
  throw ConfigError("unknown metric '" + std::string(text) + "'");
}

double metric_value(const ConfusionMatrix& cm, Metric metric) {
  return metric == Metric::kAccuracy ? accuracy(cm) : macro_f1(cm);
}

}  // namespace lexattn
