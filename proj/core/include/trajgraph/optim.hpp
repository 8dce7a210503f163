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

#ifndef TRAJGRAPH__OPTIM_HPP_
#define TRAJGRAPH__OPTIM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "trajgraph/tensor.hpp"

namespace trajgraph
{

struct AdamConfig
{
  double learning_rate{1e-3};
  double beta1{0.9};
  double beta2{0.999};
  double epsilon{1e-8};
};

/// Per-parameter moment estimates for bias-corrected Adam.
struct OptimizerState
{
  AdamConfig config;
  std::size_t step{0};
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

OptimizerState make_optimizer_state(std::span<const Tensor> params, AdamConfig config);

/// One Adam update of `params` from `grads` (parallel spans, equal shapes).
void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimizerState & state);

/// Same update, reading each parameter's own accumulated gradient.
void adam_step(std::span<Tensor> params, OptimizerState & state);

/// Rescales all gradients in place so their joint L2 norm is at most
/// `max_norm`. Returns the norm before clipping.
double clip_grad_norm(std::span<Tensor> params, double max_norm);

}  // namespace trajgraph

#endif  // TRAJGRAPH__OPTIM_HPP_
