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

#ifndef LEXATTN_AUTODIFF_H_
#define LEXATTN_AUTODIFF_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "lexattn/tensor.h"

namespace lexattn {

using NodeId = std::size_t;

class Tape;

// Handle to a tensor recorded on a Tape. Cheap to copy; valid only while the
// owning tape is alive.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  NodeId id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, NodeId id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  NodeId id_ = 0;
};

// Result of Tape::backward: accumulated gradient for every recorded node.
class Gradients {
 public:
  Gradients() = default;

  // Gradient of the loss with respect to `v`; zeros when `v` does not reach
  // the loss.
  Tensor operator[](Var v) const;
  bool reached(Var v) const;

 private:
  friend class Tape;
  std::vector<std::vector<double>> grads_;
  std::vector<Shape> shapes_;
};

// Append-only record of operations for reverse-mode differentiation.
//
// Define-by-run: build a fresh tape for each forward pass. Node ids are
// assigned in recording order, which is a topological order, so backward
// simply walks the nodes in reverse.
class Tape {
 public:
  // Receives the output gradient of the node and pushes contributions into
  // the inputs through Tape::accumulate.
  using BackwardFn = std::function<void(std::span<const double> out_grad, Tape& tape)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that receives a gradient.
  Var variable(Tensor value);
  // Leaf excluded from differentiation.
  Var constant(Tensor value);

  // Records the result of an operation. `backward` is dropped when none of
  // `inputs` requires a gradient. The new node's id is size() at call time.
  Var record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward);

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  bool requires_grad(NodeId id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Gradient buffer of `id` during a backward pass, zero-initialised on first
  // touch. Empty span when `id` does not require a gradient.
  std::span<double> accumulate(NodeId id);

  Gradients backward(Var loss);

 private:
  struct Node {
    Tensor value;
    std::vector<NodeId> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
};

namespace ad {

enum class Elementwise { kAdd, kMul, kTanh, kSigmoid };

Var elementwise(Elementwise kind, std::span<const Var> operands);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var tanh(Var a);
Var sigmoid(Var a);

// a[m x k] * b[k x n].
Var matmul(Var a, Var b);
// x[m x in] * w[out x in]^T, optionally + bias[out] on every row. A rank-1
// weight of length `in` acts as a single output row.
Var linear(Var x, Var w);
Var linear(Var x, Var w, Var bias);
// x[m x n] + bias[n] on every row.
Var add_bias(Var x, Var bias);

// Concatenation along the last axis.
Var concat(Var a, Var b);
Var concat(std::span<const Var> parts);
// Columns [begin, begin + count) of x.
Var slice_cols(Var x, std::size_t begin, std::size_t count);
// Rows [begin, begin + count) of x, as a matrix.
Var slice_rows(Var x, std::size_t begin, std::size_t count);
// Row i of the result is row indices[i] of table.
Var gather_rows(Var table, std::span<const std::int32_t> indices);

// Row-wise softmax over the first lengths[r] entries of each row; the
// remaining entries are exactly zero. A rank-1 input is one row.
Var masked_softmax(Var scores, std::span<const std::size_t> lengths);
Var masked_softmax(Var scores, std::size_t valid_len);

// y[i][j] = x[i][j] * w[i] for w of m entries.
Var scale_rows(Var x, Var w);
// Sum of all entries, as a scalar.
Var sum(Var x);
// Mean over rows of -log softmax(logits[i])[labels[i]].
Var softmax_cross_entropy(Var logits, std::span<const std::int32_t> labels);

}  // namespace ad
}  // namespace lexattn

#endif  // LEXATTN_AUTODIFF_H_
