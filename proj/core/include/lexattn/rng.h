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

#ifndef LEXATTN_RNG_H_
#define LEXATTN_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace lexattn {

// Seeded pseudo-random source shared by initialisation, shuffling, noise and
// dropout. Identical seeds give identical streams on the same toolchain.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi);
  double normal(double mean, double stddev);
  bool bernoulli(double p);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    std::shuffle(items.begin(), items.end(), engine_);
  }

  // Derives an independent seed, e.g. one per epoch.
  std::uint64_t fork();

 private:
  std::mt19937_64 engine_;
};

// Deterministic mixing of two seeds (splitmix64 finaliser).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace lexattn

#endif  // LEXATTN_RNG_H_
