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

#ifndef LEXATTN_METRICS_H_
#define LEXATTN_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexattn {

// counts(gold, predicted).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);
  static ConfusionMatrix from_predictions(std::size_t num_classes,
                                          std::span<const std::int32_t> gold,
                                          std::span<const std::int32_t> predicted);

  void add(std::size_t gold, std::size_t predicted, std::size_t count = 1);
  std::size_t num_classes() const { return n_; }
  std::size_t operator()(std::size_t gold, std::size_t predicted) const {
    return counts_[gold * n_ + predicted];
  }
  std::size_t total() const { return total_; }

 private:
  std::size_t n_;
  std::size_t total_ = 0;
  std::vector<std::size_t> counts_;
};

enum class F1Average { kMacro, kMicro };

std::string_view to_string(F1Average average);
F1Average parse_f1_average(std::string_view text);

// Throw ContractError on an empty matrix.
double accuracy(const ConfusionMatrix& cm);
// Per-class F1 is 0 when precision + recall is 0.
double macro_f1(const ConfusionMatrix& cm);
double micro_f1(const ConfusionMatrix& cm);
double f1_score(const ConfusionMatrix& cm, F1Average average);

enum class Metric { kAccuracy, kMacroF1 };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);
double metric_value(const ConfusionMatrix& cm, Metric metric);

}  // namespace lexattn

#endif  // LEXATTN_METRICS_H_
