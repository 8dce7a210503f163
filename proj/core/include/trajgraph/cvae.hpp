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

#ifndef TRAJGRAPH__CVAE_HPP_
#define TRAJGRAPH__CVAE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/dataset.hpp"
#include "trajgraph/model.hpp"
#include "trajgraph/optim.hpp"

namespace trajgraph
{

/// sum_v sum_k q_vk ln(q_vk / p_vk) with 0 ln 0 = 0. Throws
/// std::overflow_error when p_vk = 0 < q_vk.
double kl_categorical(const std::vector<std::vector<double>> & q, const std::vector<std::vector<double>> & p);
double kl_categorical(const CategoricalFactors & q, const CategoricalFactors & p);
/// Differentiable form over log-probabilities; scalar tensor.
Tensor kl_categorical_tensor(const CategoricalFactors & q, const CategoricalFactors & p);

/// Per-node quantities of one example.
struct NodeObjective
{
  NodeId node{0};
  /// sum_z q(z) log p(y|x,z) - beta KL(q||p).
  Tensor elbo;
  /// log p(y|z,x) summed over the horizon, one entry per joint z, shape [J].
  Tensor log_likelihood;
  CategoricalFactors prior;
  std::optional<CategoricalFactors> posterior;
  Tensor kl;
};

/// Training-mode objective for one predicted node.
NodeObjective node_objective(
  const GraphCvae & model, const TrainingExample & example, NodeId node, double beta,
  const std::optional<Tensor> & fce = std::nullopt);

/// FCE output for the example's agent future when any predicted node is
/// adjacent to the agent.
std::optional<Tensor> shared_future_encoding(const GraphCvae & model, const TrainingExample & example);

/// ELBO summed over the predicted nodes of one example (scalar tensor).
Tensor elbo(const GraphCvae & model, const TrainingExample & example, double beta);

/// Exact -log sum_z p(z|x) prod_k p(y_k|x,z) for one node.
Tensor node_nll(
  const GraphCvae & model, const TrainingExample & example, NodeId node,
  const std::optional<Tensor> & fce = std::nullopt);
/// Node NLLs summed over the example's predicted nodes.
double eval_nll(const GraphCvae & model, const TrainingExample & example);
/// Mean of eval_nll over `examples`.
double eval_nll(const GraphCvae & model, const std::vector<TrainingExample> & examples);

/// Linear 0 -> 1 over `anneal_steps` steps (steps counted from 0).
double kl_weight(std::size_t step, std::size_t anneal_steps);

struct TrainConfig
{
  std::uint64_t seed{1};
  double learning_rate{3e-3};
  std::size_t batch_size{8};
  std::size_t steps{230};
  std::size_t kl_anneal_steps{50};
  /// Validation NLL every this many steps (also at the first and last step); 0 = only those two.
  std::size_t eval_every{50};
  double clip_norm{5.0};
  /// Validation examples scored per evaluation (evenly strided subset); 0 = all.
  std::size_t val_max_examples{0};

  void validate() const;
};

struct MetricsRecord
{
  std::size_t step{0};
  double beta{0.0};
  /// Mean per-example ELBO of the step's minibatch; absent on the closing record.
  std::optional<double> train_elbo;
  std::optional<double> val_nll;
  double grad_norm{0.0};
  double wall_ms{0.0};
};

struct TrainResult
{
  std::vector<MetricsRecord> metrics;
  std::optional<double> initial_val_nll;
  std::optional<double> final_val_nll;
};

/// Minibatch ascent on the ELBO. Record k holds the minibatch ELBO and (when
/// due) validation NLL at the weights before update k; a closing record with
/// step = steps carries the final validation NLL. `on_record` sees each record
/// as it is produced. Throws RunError on a non-finite loss or gradient.
TrainResult train(
  GraphCvae & model, const std::vector<TrainingExample> & train_set, const std::vector<TrainingExample> & val_set,
  const TrainConfig & config, const std::function<void(const MetricsRecord &)> & on_record = {});

/// Validation subset used by train().
std::vector<TrainingExample> strided_subset(const std::vector<TrainingExample> & examples, std::size_t max_count);

struct SampledFuture
{
  std::size_t joint_z{0};
  std::vector<std::size_t> assignment;
  /// Actions at t+1 .. t+S.
  std::vector<CourtAction> actions;
  /// Positions reached after each action, starting from x^(t+1).
  std::vector<CourtState> states;
};

struct NodeSamples
{
  NodeId node{0};
  NodeType type;
  std::vector<SampledFuture> samples;
};

/// `count` futures per predicted node (or only `nodes` when given), z drawn
/// from the prior. Each node has its own random stream derived from `seed`
/// and its id, so one node's samples do not depend on any other node.
std::vector<NodeSamples> sample_futures(
  const GraphCvae & model, const TrainingExample & example, std::size_t count, std::uint64_t seed,
  const std::vector<NodeId> & nodes = {});

}  // namespace trajgraph

#endif  // TRAJGRAPH__CVAE_HPP_
