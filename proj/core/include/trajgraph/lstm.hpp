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

#ifndef TRAJGRAPH__LSTM_HPP_
#define TRAJGRAPH__LSTM_HPP_

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "trajgraph/tensor.hpp"

namespace trajgraph
{

enum Gate : std::size_t { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCellGate = 3 };

/// Gate parameters of one LSTM cell. Inputs are row batches, so the input
/// weights are [input x hidden], recurrent weights [hidden x hidden], and
/// biases [1 x hidden]:
///
///   i = sigmoid(x Wi + h Ui + bi)      f = sigmoid(x Wf + h Uf + bf)
///   o = sigmoid(x Wo + h Uo + bo)      g = tanh(x Wc + h Uc + bc)
///   c' = f * c + i * g                 h' = o * tanh(c')
struct LstmCellWeights
{
  std::array<Tensor, 4> input_weights;
  std::array<Tensor, 4> recurrent_weights;
  std::array<Tensor, 4> biases;
  std::size_t input_size{0};
  std::size_t hidden_size{0};

  /// Throws DimensionError unless all twelve blocks agree with the sizes.
  void validate() const;
};

struct LstmState
{
  Tensor h;
  Tensor c;
};

LstmState zero_state(std::size_t batch, std::size_t hidden);

/// One cell update for a [batch x input] row block.
LstmState lstm_step(const LstmCellWeights & cell, const Tensor & x, const Tensor & h_prev, const Tensor & c_prev);

/// Gate blocks concatenated once so a sequence costs two matmuls per step.
class FusedLstm
{
public:
  explicit FusedLstm(const LstmCellWeights & cell);

  LstmState step(const Tensor & x, const LstmState & prev) const;
  std::size_t hidden_size() const { return hidden_; }
  std::size_t input_size() const { return input_; }

private:
  Tensor input_weights_;
  Tensor recurrent_weights_;
  Tensor bias_;
  std::size_t input_;
  std::size_t hidden_;
};

/// Runs the cell over `sequence` from `initial` (zero when omitted) and
/// returns the final state.
LstmState run_lstm(const LstmCellWeights & cell, std::span<const Tensor> sequence);
LstmState run_lstm(const LstmCellWeights & cell, std::span<const Tensor> sequence, const LstmState & initial);

struct BiLstmWeights
{
  LstmCellWeights forward;
  LstmCellWeights backward;
};

/// [h_fwd | c_fwd | h_bwd | c_bwd] of the final forward and backward states,
/// width 4 * hidden.
Tensor run_bilstm(const BiLstmWeights & cell, std::span<const Tensor> sequence);

}  // namespace trajgraph

#endif  // TRAJGRAPH__LSTM_HPP_
