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

#include "trajgraph/optim.hpp"

#include <cmath>

namespace trajgraph
{

OptimizerState make_optimizer_state(std::span<const Tensor> params, AdamConfig config)
{
  OptimizerState state;
  state.config = config;
  for (const auto & p : params) {
    state.first_moment.emplace_back(p.size(), 0.0);
    state.second_moment.emplace_back(p.size(), 0.0);
  }
  return state;
}

namespace
{
void update(Tensor & param, std::span<const double> grad, std::size_t index, OptimizerState & state)
{
  if (grad.size() != param.size() || state.first_moment[index].size() != param.size()) {
    throw DimensionError(
      "adam_step: parameter " + std::to_string(index) + " of shape " +
      shape_to_string(param.shape()) + " misaligned with its gradient or moments");
  }
  const auto & c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  auto & m = state.first_moment[index];
  auto & v = state.second_moment[index];
  auto values = param.mutable_values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double g = grad[i];
    m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
    v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    values[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.epsilon);
  }
}
}  // namespace

void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, OptimizerState & state)
{
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw DimensionError("adam_step: parameter, gradient and state counts differ");
  }
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) update(params[i], grads[i].values(), i, state);
}

void adam_step(std::span<Tensor> params, OptimizerState & state)
{
  if (params.size() != state.first_moment.size()) {
    throw DimensionError("adam_step: parameter and state counts differ");
  }
  ++state.step;
  for (std::size_t i = 0; i < params.size(); ++i) update(params[i], params[i].grad(), i, state);
}

double clip_grad_norm(std::span<Tensor> params, double max_norm)
{
  double sq = 0.0;
  for (auto & p : params)
    for (double g : p.grad()) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (auto & p : params)
      for (double & g : p.mutable_grad()) g *= f;
  }
  return norm;
}

}  // namespace trajgraph
