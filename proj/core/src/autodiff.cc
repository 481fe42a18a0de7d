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

#include "lexattn/autodiff.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "lexattn/errors.h"

namespace lexattn {

const Tensor& Var::value() const { return tape_->value(id_); }

Tensor Gradients::operator[](Var v) const {
  if (v.id() >= shapes_.size()) {
    throw ContractError("gradient requested for a node from another tape");
  }
  const auto& g = grads_[v.id()];
  if (g.empty()) return Tensor(shapes_[v.id()]);
  return Tensor(shapes_[v.id()], g);
}

bool Gradients::reached(Var v) const {
  return v.id() < grads_.size() && !grads_[v.id()].empty();
}

Var Tape::variable(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<NodeId> inputs, BackwardFn backward) {
  const bool needs = std::any_of(inputs.begin(), inputs.end(),
                                 [this](NodeId id) { return nodes_[id].requires_grad; });
  if (!needs) backward = nullptr;
  nodes_.push_back(Node{std::move(value), std::move(inputs), std::move(backward), needs});
  return Var(this, nodes_.size() - 1);
}

std::span<double> Tape::accumulate(NodeId id) {
  if (!nodes_[id].requires_grad) return {};
  auto& g = grads_[id];
  if (g.empty()) g.assign(nodes_[id].value.size(), 0.0);
  return g;
}

Gradients Tape::backward(Var loss) {
  if (&loss.tape() != this) throw ContractError("loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        shape_string(loss.shape()));
  }
  grads_.assign(nodes_.size(), {});
  if (nodes_[loss.id()].requires_grad) grads_[loss.id()].assign(1, 1.0);

  for (NodeId id = loss.id() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.backward || grads_[id].empty()) continue;
    node.backward(grads_[id], *this);
  }

  Gradients out;
  out.shapes_.reserve(nodes_.size());
  for (const auto& n : nodes_) out.shapes_.push_back(n.value.shape());
  out.grads_ = std::move(grads_);
  grads_.clear();
  return out;
}

namespace ad {
namespace {

Tape& same_tape(Var a, Var b) {
  if (!a.valid() || !b.valid() || &a.tape() != &b.tape()) {
    throw ContractError("operands are not recorded on the same tape");
  }
  return a.tape();
}

void require_same_shape(const char* op, Var a, Var b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

void require_matrix(const char* op, Var x) {
  if (x.value().rank() > 2) {
    throw DimensionError(std::string(op) + ": rank > 2 operand " + shape_string(x.shape()));
  }
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var elementwise(Elementwise kind, std::span<const Var> operands) {
  switch (kind) {
    case Elementwise::kAdd:
    case Elementwise::kMul:
      if (operands.size() != 2) {
        throw ContractError("add/mul take exactly two operands");
      }
      return kind == Elementwise::kAdd ? add(operands[0], operands[1])
                                       : mul(operands[0], operands[1]);
    case Elementwise::kTanh:
    case Elementwise::kSigmoid:
      if (operands.size() != 1) {
        throw ContractError("tanh/sigmoid take exactly one operand");
      }
      return kind == Elementwise::kTanh ? tanh(operands[0]) : sigmoid(operands[0]);
  }
  throw ContractError("unknown elementwise kind");
}

Var add(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require_same_shape("add", a, b);
  Tensor out = a.value();
  const auto bv = b.value().data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib},
                     [ia, ib](std::span<const double> g, Tape& t) {
                       for (NodeId id : {ia, ib}) {
                         auto ga = t.accumulate(id);
                         for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                       }
                     });
}

Var sub(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require_same_shape("sub", a, b);
  Tensor out = a.value();
  const auto bv = b.value().data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] -= bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib},
                     [ia, ib](std::span<const double> g, Tape& t) {
                       auto ga = t.accumulate(ia);
                       for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i];
                       auto gb = t.accumulate(ib);
                       for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
                     });
}

Var mul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require_same_shape("mul", a, b);
  Tensor out = a.value();
  const auto bv = b.value().data();
  auto ov = out.data();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
  const NodeId ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib},
                     [ia, ib](std::span<const double> g, Tape& t) {
                       const auto av = t.value(ia).data();
                       const auto bv = t.value(ib).data();
                       auto ga = t.accumulate(ia);
                       for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * bv[i];
                       auto gb = t.accumulate(ib);
                       for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * av[i];
                     });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& v : out.data()) v *= factor;
  const NodeId ia = a.id();
  return a.tape().record(std::move(out), {ia},
                         [ia, factor](std::span<const double> g, Tape& t) {
                           auto ga = t.accumulate(ia);
                           for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * factor;
                         });
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = std::tanh(v);
  Tape& tape = a.tape();
  const NodeId ia = a.id(), iy = tape.size();
  return tape.record(std::move(out), {ia},
                     [ia, iy](std::span<const double> g, Tape& t) {
                       const auto yv = t.value(iy).data();
                       auto ga = t.accumulate(ia);
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += g[i] * (1.0 - yv[i] * yv[i]);
                       }
                     });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& v : out.data()) v = sigmoid_scalar(v);
  Tape& tape = a.tape();
  const NodeId ia = a.id(), iy = tape.size();
  return tape.record(std::move(out), {ia},
                     [ia, iy](std::span<const double> g, Tape& t) {
                       const auto yv = t.value(iy).data();
                       auto ga = t.accumulate(ia);
                       for (std::size_t i = 0; i < ga.size(); ++i) {
                         ga[i] += g[i] * yv[i] * (1.0 - yv[i]);
                       }
                     });
}

Var matmul(Var a, Var b) {
  Tape& tape = same_tape(a, b);
  require_matrix("matmul", a);
  require_matrix("matmul", b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) {
    throw DimensionError("matmul: inner dimensions differ, " + shape_string(av.shape()) +
                         " x " + shape_string(bv.shape()));
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &bv.data()[p * n];
      double* orow = &out.data()[i * n];
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  const NodeId ia = a.id(), ib = b.id();
  return tape.record(std::move(out), {ia, ib},
                     [ia, ib, m, k, n](std::span<const double> g, Tape& t) {
                       const auto A = t.value(ia).data();
                       const auto B = t.value(ib).data();
                       // dA = G B^T
                       if (auto ga = t.accumulate(ia); !ga.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             double s = 0.0;
                             for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * B[p * n + j];
                             ga[i * k + p] += s;
                           }
                       }
                       // dB = A^T G
                       if (auto gb = t.accumulate(ib); !gb.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             const double aip = A[i * k + p];
                             for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * g[i * n + j];
                           }
                       }
                     });
}

namespace {

Var linear_impl(Var x, Var w, const Var* bias) {
  Tape& tape = same_tape(x, w);
  require_matrix("linear", x);
  require_matrix("linear", w);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const std::size_t m = xv.rows(), in = xv.cols(), out_dim = wv.rows();
  if (wv.cols() != in) {
    throw DimensionError("linear: input " + shape_string(xv.shape()) +
                         " does not match weight " + shape_string(wv.shape()));
  }
  if (bias != nullptr) {
    same_tape(x, *bias);
    if (bias->value().size() != out_dim || bias->value().rank() > 1) {
      throw DimensionError("linear: bias " + shape_string(bias->shape()) +
                           " does not match weight " + shape_string(wv.shape()));
    }
  }
  Tensor out({m, out_dim});
  const auto X = xv.data();
  const auto W = wv.data();
  auto O = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* xr = &X[i * in];
    for (std::size_t o = 0; o < out_dim; ++o) {
      const double* wr = &W[o * in];
      double s = 0.0;
      for (std::size_t p = 0; p < in; ++p) s += xr[p] * wr[p];
      O[i * out_dim + o] = s;
    }
  }
  std::vector<NodeId> inputs{x.id(), w.id()};
  if (bias != nullptr) {
    const auto B = bias->value().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t o = 0; o < out_dim; ++o) O[i * out_dim + o] += B[o];
    inputs.push_back(bias->id());
  }
  const NodeId ix = x.id(), iw = w.id();
  const NodeId ib = bias != nullptr ? bias->id() : ix;
  const bool has_bias = bias != nullptr;
  return tape.record(std::move(out), std::move(inputs),
                     [ix, iw, ib, has_bias, m, in, out_dim](std::span<const double> g, Tape& t) {
                       const auto X = t.value(ix).data();
                       const auto W = t.value(iw).data();
                       // dx = G W
                       if (auto gx = t.accumulate(ix); !gx.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double gio = g[i * out_dim + o];
                             if (gio == 0.0) continue;
                             const double* wr = &W[o * in];
                             double* gr = &gx[i * in];
                             for (std::size_t p = 0; p < in; ++p) gr[p] += gio * wr[p];
                           }
                       }
                       // dW = G^T x
                       if (auto gw = t.accumulate(iw); !gw.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t o = 0; o < out_dim; ++o) {
                             const double gio = g[i * out_dim + o];
                             if (gio == 0.0) continue;
                             const double* xr = &X[i * in];
                             double* gr = &gw[o * in];
                             for (std::size_t p = 0; p < in; ++p) gr[p] += gio * xr[p];
                           }
                       }
                       if (has_bias) {
                         if (auto gb = t.accumulate(ib); !gb.empty()) {
                           for (std::size_t i = 0; i < m; ++i)
                             for (std::size_t o = 0; o < out_dim; ++o) gb[o] += g[i * out_dim + o];
                         }
                       }
                     });
}

}  // namespace

Var linear(Var x, Var w) { return linear_impl(x, w, nullptr); }
Var linear(Var x, Var w, Var bias) { return linear_impl(x, w, &bias); }

Var add_bias(Var x, Var bias) {
  Tape& tape = same_tape(x, bias);
  require_matrix("add_bias", x);
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (bias.value().size() != n || bias.value().rank() > 1) {
    throw DimensionError("add_bias: bias " + shape_string(bias.shape()) +
                         " does not match " + shape_string(x.shape()));
  }
  Tensor out = x.value();
  const auto B = bias.value().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += B[j];
  const NodeId ix = x.id(), ib = bias.id();
  return tape.record(std::move(out), {ix, ib},
                     [ix, ib, m, n](std::span<const double> g, Tape& t) {
                       auto gx = t.accumulate(ix);
                       for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i];
                       auto gb = t.accumulate(ib);
                       if (!gb.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
                       }
                     });
}

Var concat(Var a, Var b) {
  const Var parts[] = {a, b};
  return concat(parts);
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat of zero tensors");
  Tape& tape = parts[0].tape();
  const std::size_t rank = parts[0].value().rank();
  if (rank == 0 || rank > 2) {
    throw DimensionError("concat: unsupported operand " + shape_string(parts[0].shape()));
  }
  const std::size_t rows = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::vector<NodeId> ids;
  std::size_t total = 0;
  for (const Var& p : parts) {
    same_tape(parts[0], p);
    if (p.value().rank() != rank || p.value().rows() != rows) {
      throw DimensionError("concat: leading dimensions differ, " +
                           shape_string(parts[0].shape()) + " vs " + shape_string(p.shape()));
    }
    widths.push_back(p.value().cols());
    ids.push_back(p.id());
    total += widths.back();
  }
  Tensor out(rank == 1 ? Shape{total} : Shape{rows, total});
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto src = parts[k].value().data();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(&src[r * widths[k]], widths[k], &out.data()[r * total + offset]);
    offset += widths[k];
  }
  return tape.record(std::move(out), ids,
                     [ids, widths, rows, total](std::span<const double> g, Tape& t) {
                       std::size_t offset = 0;
                       for (std::size_t k = 0; k < ids.size(); ++k) {
                         auto gk = t.accumulate(ids[k]);
                         if (!gk.empty()) {
                           for (std::size_t r = 0; r < rows; ++r)
                             for (std::size_t j = 0; j < widths[k]; ++j)
                               gk[r * widths[k] + j] += g[r * total + offset + j];
                         }
                         offset += widths[k];
                       }
                     });
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  require_matrix("slice_cols", x);
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (begin + count > n) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + shape_string(x.shape()));
  }
  Tensor out({m, count});
  const auto X = x.value().data();
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(&X[i * n + begin], count, &out.data()[i * count]);
  const NodeId ix = x.id();
  return x.tape().record(std::move(out), {ix},
                         [ix, m, n, begin, count](std::span<const double> g, Tape& t) {
                           auto gx = t.accumulate(ix);
                           for (std::size_t i = 0; i < m; ++i)
                             for (std::size_t j = 0; j < count; ++j)
                               gx[i * n + begin + j] += g[i * count + j];
                         });
}

Var slice_rows(Var x, std::size_t begin, std::size_t count) {
  require_matrix("slice_rows", x);
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (begin + count > m) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") out of " + shape_string(x.shape()));
  }
  const auto X = x.value().data();
  Tensor out({count, n}, std::vector<double>(X.begin() + static_cast<long>(begin * n),
                                             X.begin() + static_cast<long>((begin + count) * n)));
  const NodeId ix = x.id();
  return x.tape().record(std::move(out), {ix},
                         [ix, begin, n](std::span<const double> g, Tape& t) {
                           auto gx = t.accumulate(ix);
                           for (std::size_t i = 0; i < g.size(); ++i) gx[begin * n + i] += g[i];
                         });
}

Var gather_rows(Var table, std::span<const std::int32_t> indices) {
  require_matrix("gather_rows", table);
  const std::size_t vocab = table.value().rows(), width = table.value().cols();
  std::vector<std::int32_t> idx(indices.begin(), indices.end());
  Tensor out({idx.size(), width});
  const auto T = table.value().data();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || static_cast<std::size_t>(idx[i]) >= vocab) {
      throw DimensionError("gather_rows: index " + std::to_string(idx[i]) +
                           " outside table " + shape_string(table.shape()));
    }
    std::copy_n(&T[idx[i] * width], width, &out.data()[i * width]);
  }
  const NodeId it = table.id();
  return table.tape().record(std::move(out), {it},
                             [it, idx = std::move(idx), width](std::span<const double> g, Tape& t) {
                               auto gt = t.accumulate(it);
                               for (std::size_t i = 0; i < idx.size(); ++i)
                                 for (std::size_t j = 0; j < width; ++j)
                                   gt[idx[i] * width + j] += g[i * width + j];
                             });
}

Var masked_softmax(Var scores, std::span<const std::size_t> lengths) {
  require_matrix("masked_softmax", scores);
  const std::size_t rows = scores.value().rows(), cols = scores.value().cols();
  if (lengths.size() != rows) {
    throw DimensionError("masked_softmax: " + std::to_string(lengths.size()) +
                         " lengths for scores " + shape_string(scores.shape()));
  }
  std::vector<std::size_t> lens(lengths.begin(), lengths.end());
  Tensor out(scores.shape());
  const auto S = scores.value().data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t len = lens[r];
    if (len == 0) throw ContractError("masked_softmax: empty sequence in row " + std::to_string(r));
    if (len > cols) {
      throw DimensionError("masked_softmax: valid length " + std::to_string(len) +
                           " exceeds " + std::to_string(cols) + " positions");
    }
    const double* s = &S[r * cols];
    double* y = &out.data()[r * cols];
    const double mx = *std::max_element(s, s + len);
    double z = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      y[j] = std::exp(s[j] - mx);
      z += y[j];
    }
    for (std::size_t j = 0; j < len; ++j) y[j] /= z;
  }
  Tape& tape = scores.tape();
  const NodeId is = scores.id(), iy = tape.size();
  return tape.record(std::move(out), {is},
                     [is, iy, cols, lens = std::move(lens)](std::span<const double> g, Tape& t) {
                       const auto Y = t.value(iy).data();
                       auto gs = t.accumulate(is);
                       for (std::size_t r = 0; r < lens.size(); ++r) {
                         const double* y = &Y[r * cols];
                         const double* gr = &g[r * cols];
                         double dot = 0.0;
                         for (std::size_t j = 0; j < lens[r]; ++j) dot += y[j] * gr[j];
                         for (std::size_t j = 0; j < lens[r]; ++j) gs[r * cols + j] += y[j] * (gr[j] - dot);
                       }
                     });
}

Var masked_softmax(Var scores, std::size_t valid_len) {
  if (scores.value().rows() != 1) {
    throw DimensionError("masked_softmax: single length for scores " +
                         shape_string(scores.shape()));
  }
  const std::size_t lens[] = {valid_len};
  return masked_softmax(scores, lens);
}

Var scale_rows(Var x, Var w) {
  Tape& tape = same_tape(x, w);
  require_matrix("scale_rows", x);
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (w.value().size() != m) {
    throw DimensionError("scale_rows: weights " + shape_string(w.shape()) +
                         " do not match rows of " + shape_string(x.shape()));
  }
  Tensor out = x.value();
  const auto W = w.value().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] *= W[i];
  const NodeId ix = x.id(), iw = w.id();
  return tape.record(std::move(out), {ix, iw},
                     [ix, iw, m, n](std::span<const double> g, Tape& t) {
                       const auto X = t.value(ix).data();
                       const auto W = t.value(iw).data();
                       if (auto gx = t.accumulate(ix); !gx.empty()) {
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[i * n + j] * W[i];
                       }
                       if (auto gw = t.accumulate(iw); !gw.empty()) {
                         for (std::size_t i = 0; i < m; ++i) {
                           double s = 0.0;
                           for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * X[i * n + j];
                           gw[i] += s;
                         }
                       }
                     });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  const NodeId ix = x.id();
  return x.tape().record(Tensor::scalar(s), {ix},
                         [ix](std::span<const double> g, Tape& t) {
                           auto gx = t.accumulate(ix);
                           for (double& v : gx) v += g[0];
                         });
}

Var softmax_cross_entropy(Var logits, std::span<const std::int32_t> labels) {
  require_matrix("softmax_cross_entropy", logits);
  const std::size_t m = logits.value().rows(), classes = logits.value().cols();
  if (labels.size() != m) {
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for logits " + shape_string(logits.shape()));
  }
  if (m == 0) throw ContractError("softmax_cross_entropy: empty batch");
  std::vector<double> probs(m * classes);
  std::vector<std::int32_t> lab(labels.begin(), labels.end());
  const auto L = logits.value().data();
  double loss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (lab[i] < 0 || static_cast<std::size_t>(lab[i]) >= classes) {
      throw DimensionError("softmax_cross_entropy: label " + std::to_string(lab[i]) +
                           " outside " + std::to_string(classes) + " classes");
    }
    const double* l = &L[i * classes];
    const double mx = *std::max_element(l, l + classes);
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) z += std::exp(l[c] - mx);
    const double log_z = mx + std::log(z);
    for (std::size_t c = 0; c < classes; ++c) probs[i * classes + c] = std::exp(l[c] - log_z);
    loss += log_z - l[lab[i]];
  }
  loss /= static_cast<double>(m);
  const NodeId il = logits.id();
  return logits.tape().record(
      Tensor::scalar(loss), {il},
      [il, m, classes, probs = std::move(probs), lab = std::move(lab)](std::span<const double> g,
                                                                        Tape& t) {
        auto gl = t.accumulate(il);
        const double scale = g[0] / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t c = 0; c < classes; ++c) {
            const double onehot = static_cast<std::size_t>(lab[i]) == c ? 1.0 : 0.0;
            gl[i * classes + c] += scale * (probs[i * classes + c] - onehot);
          }
      });
}

}  // namespace ad
}  // namespace lexattn
