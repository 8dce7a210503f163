// Copyright 2026 The trajgraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trajgraph/lstm.hpp"

#include <string>

namespace trajgraph
{

void LstmCellWeights::validate() const
{
  for (std::size_t g = 0; g < 4; ++g) {
    const bool ok = input_weights[g].shape() == Shape{input_size, hidden_size} &&
                    recurrent_weights[g].shape() == Shape{hidden_size, hidden_size} &&
                    biases[g].shape() == Shape{1, hidden_size};
    if (!ok) {
      throw DimensionError(
        "lstm: gate " + std::to_string(g) + " blocks " + shape_to_string(input_weights[g].shape()) + ", " +
        shape_to_string(recurrent_weights[g].shape()) + ", " + shape_to_string(biases[g].shape()) +
        " inconsistent with input " + std::to_string(input_size) + ", hidden " + std::to_string(hidden_size));
    }
  }
}

LstmState zero_state(std::size_t batch, std::size_t hidden)
{
  return {Tensor::zeros({batch, hidden}), Tensor::zeros({batch, hidden})};
}

FusedLstm::FusedLstm(const LstmCellWeights & cell)
: input_(cell.input_size), hidden_(cell.hidden_size)
{
  cell.validate();
  input_weights_ = concat(std::span<const Tensor>(cell.input_weights), 1);
  recurrent_weights_ = concat(std::span<const Tensor>(cell.recurrent_weights), 1);
  bias_ = concat(std::span<const Tensor>(cell.biases), 1);
}

LstmState FusedLstm::step(const Tensor & x, const LstmState & prev) const
{
  if (x.rank() != 2 || x.dim(1) != input_) {
    throw DimensionError(
      "lstm_step: input " + shape_to_string(x.shape()) + " does not match input size " + std::to_string(input_));
  }
  const std::size_t batch = x.dim(0);
  if (prev.h.shape() != Shape{batch, hidden_} || prev.c.shape() != Shape{batch, hidden_}) {
    throw DimensionError(
      "lstm_step: state " + shape_to_string(prev.h.shape()) + "/" + shape_to_string(prev.c.shape()) +
      " does not match [" + std::to_string(batch) + "x" + std::to_string(hidden_) + "]");
  }
  Tensor pre = matmul(x, input_weights_) + matmul(prev.h, recurrent_weights_) + repeat_rows(bias_, batch);
  const std::size_t H = hidden_;
  Tensor i = sigmoid(slice(pre, 1, 0, H));
  Tensor f = sigmoid(slice(pre, 1, H, 2 * H));
  Tensor o = sigmoid(slice(pre, 1, 2 * H, 3 * H));
  Tensor g = tanh(slice(pre, 1, 3 * H, 4 * H));
  Tensor c = f * prev.c + i * g;
  Tensor h = o * tanh(c);
  return {h, c};
}

LstmState lstm_step(const LstmCellWeights & cell, const Tensor & x, const Tensor & h_prev, const Tensor & c_prev)
{
  return FusedLstm(cell).step(x, {h_prev, c_prev});
}

LstmState run_lstm(const LstmCellWeights & cell, std::span<const Tensor> sequence, const LstmState & initial)
{
  FusedLstm fused(cell);
  LstmState s = initial;
  for (const auto & x : sequence) s = fused.step(x, s);
  return s;
}

LstmState run_lstm(const LstmCellWeights & cell, std::span<const Tensor> sequence)
{
  const std::size_t batch = sequence.empty() ? 1 : sequence.front().dim(0);
  return run_lstm(cell, sequence, zero_state(batch, cell.hidden_size));
}

Tensor run_bilstm(const BiLstmWeights & cell, std::span<const Tensor> sequence)
{
  const LstmState fwd = run_lstm(cell.forward, sequence);
  std::vector<Tensor> reversed(sequence.rbegin(), sequence.rend());
  const LstmState bwd = run_lstm(cell.backward, reversed);
  return concat({fwd.h, fwd.c, bwd.h, bwd.c}, 1);
}

}  // namespace trajgraph
