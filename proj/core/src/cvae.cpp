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

#include "trajgraph/cvae.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace trajgraph
{

double kl_categorical(const std::vector<std::vector<double>> & q, const std::vector<std::vector<double>> & p)
{
  if (q.size() != p.size()) throw DimensionError("kl_categorical: variable counts differ");
  double kl = 0.0;
  for (std::size_t v = 0; v < q.size(); ++v) {
    if (q[v].size() != p[v].size()) throw DimensionError("kl_categorical: category counts differ");
    for (std::size_t k = 0; k < q[v].size(); ++k) {
      const double qk = q[v][k];
      if (qk <= 0.0) continue;
      if (p[v][k] <= 0.0) {
        throw std::overflow_error(
          "kl_categorical: infinite divergence, p is zero where q > 0 (variable " + std::to_string(v) +
          ", category " + std::to_string(k) + ")");
      }
      kl += qk * std::log(qk / p[v][k]);
    }
  }
  return kl;
}

double kl_categorical(const CategoricalFactors & q, const CategoricalFactors & p)
{
  std::vector<std::vector<double>> qv;
  std::vector<std::vector<double>> pv;
  for (std::size_t v = 0; v < q.variables(); ++v) qv.push_back(q.probabilities(v));
  for (std::size_t v = 0; v < p.variables(); ++v) pv.push_back(p.probabilities(v));
  return kl_categorical(qv, pv);
}

Tensor kl_categorical_tensor(const CategoricalFactors & q, const CategoricalFactors & p)
{
  if (q.log_probs.shape() != p.log_probs.shape()) throw DimensionError("kl_categorical: latent specs differ");
  return sum(mul(exp(q.log_probs), sub(q.log_probs, p.log_probs)));
}

namespace
{

Tensor horizon_log_likelihood(const std::vector<GmmHead> & heads, std::span<const CourtAction> future)
{
  Tensor total = gmm_log_density(heads.at(0), future[0]);
  for (std::size_t k = 1; k < heads.size(); ++k) total = add(total, gmm_log_density(heads[k], future[k]));
  return total;
}

void require_predicted(const TrainingExample & example, NodeId node)
{
  if (node == example.agent_id) throw ContractError("node " + std::to_string(node) + " is the conditioning agent");
  example.node(node);
}

}  // namespace

std::optional<Tensor> shared_future_encoding(const GraphCvae & model, const TrainingExample & example)
{
  for (NodeId n : example.predicted_nodes()) {
    if (agent_adjacent(example.graph, n, example.agent_id)) {
      return model.encode_future_conditional(example.agent_future, true);
    }
  }
  return std::nullopt;
}

NodeObjective node_objective(
  const GraphCvae & model, const TrainingExample & example, NodeId node, double beta,
  const std::optional<Tensor> & fce)
{
  require_predicted(example, node);
  const NodeWindow & w = example.node(node);
  const EncodingBundle bundle = model.encode(example, node, Phase::kTraining, fce);
  NodeObjective out;
  out.node = node;
  out.prior = model.prior(bundle, w.type);
  out.posterior = model.posterior(bundle, w.type);
  const Tensor z = model.config().latent.enumerate();
  const auto heads = model.decode_teacher_forced(bundle, z, w.last_action, w.future, w.type);
  out.log_likelihood = horizon_log_likelihood(heads, w.future);
  const Tensor log_q = out.posterior->joint_log_prob(z);
  const Tensor expected = sum(mul(exp(log_q), out.log_likelihood));
  out.kl = kl_categorical_tensor(*out.posterior, out.prior);
  out.elbo = sub(expected, scale(out.kl, beta));
  return out;
}

Tensor elbo(const GraphCvae & model, const TrainingExample & example, double beta)
{
  const auto fce = shared_future_encoding(model, example);
  const auto nodes = example.predicted_nodes();
  if (nodes.empty()) return Tensor::scalar(0.0);
  Tensor total = node_objective(model, example, nodes[0], beta, fce).elbo;
  for (std::size_t i = 1; i < nodes.size(); ++i) total = add(total, node_objective(model, example, nodes[i], beta, fce).elbo);
  return total;
}

Tensor node_nll(const GraphCvae & model, const TrainingExample & example, NodeId node, const std::optional<Tensor> & fce)
{
  require_predicted(example, node);
  const NodeWindow & w = example.node(node);
  const EncodingBundle bundle = model.encode(example, node, Phase::kInference, fce);
  const CategoricalFactors p = model.prior(bundle, w.type);
  const Tensor z = model.config().latent.enumerate();
  const auto heads = model.decode_teacher_forced(bundle, z, w.last_action, w.future, w.type);
  const Tensor joint = add(p.joint_log_prob(z), horizon_log_likelihood(heads, w.future));
  return neg(logsumexp(joint, 0));
}

double eval_nll(const GraphCvae & model, const TrainingExample & example)
{
  NoGradScope no_grad;
  const auto fce = shared_future_encoding(model, example);
  double total = 0.0;
  for (NodeId n : example.predicted_nodes()) total += node_nll(model, example, n, fce).item();
  return total;
}

double eval_nll(const GraphCvae & model, const std::vector<TrainingExample> & examples)
{
  if (examples.empty()) throw ContractError("eval_nll: empty example set");
  double total = 0.0;
  for (const auto & ex : examples) total += eval_nll(model, ex);
  return total / static_cast<double>(examples.size());
}

double kl_weight(std::size_t step, std::size_t anneal_steps)
{
  if (anneal_steps == 0) return 1.0;
  return std::min(1.0, static_cast<double>(step) / static_cast<double>(anneal_steps));
}

void TrainConfig::validate() const
{
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("train: learning_rate must be >= 0");
  if (batch_size == 0) throw ConfigError("train: batch_size must be positive");
  if (!(clip_norm >= 0.0)) throw ConfigError("train: clip_norm must be >= 0 (0 disables clipping)");
}

std::vector<TrainingExample> strided_subset(const std::vector<TrainingExample> & examples, std::size_t max_count)
{
  if (max_count == 0 || examples.size() <= max_count) return examples;
  std::vector<TrainingExample> out;
  out.reserve(max_count);
  for (std::size_t i = 0; i < max_count; ++i) out.push_back(examples[i * examples.size() / max_count]);
  return out;
}

TrainResult train(
  GraphCvae & model, const std::vector<TrainingExample> & train_set, const std::vector<TrainingExample> & val_set,
  const TrainConfig & config, const std::function<void(const MetricsRecord &)> & on_record)
{
  config.validate();
  if (train_set.empty()) throw ContractError("train: empty training set");
  const auto start = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  const std::vector<TrainingExample> val = strided_subset(val_set, config.val_max_examples);
  auto validate_now = [&]() -> std::optional<double> {
    if (val.empty()) return std::nullopt;
    return eval_nll(model, val);
  };

  std::vector<Tensor> params = model.registry().parameters();
  OptimizerState opt = make_optimizer_state(params, AdamConfig{.learning_rate = config.learning_rate});
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  TrainResult result;
  auto emit = [&](MetricsRecord r) {
    r.wall_ms = elapsed_ms();
    if (on_record) on_record(r);
    result.metrics.push_back(std::move(r));
  };

  for (std::size_t step = 0; step < config.steps; ++step) {
    MetricsRecord rec;
    rec.step = step;
    rec.beta = kl_weight(step, config.kl_anneal_steps);
    if (step == 0 || (config.eval_every != 0 && step % config.eval_every == 0)) {
      rec.val_nll = validate_now();
      if (step == 0) result.initial_val_nll = rec.val_nll;
    }

    model.registry().zero_grad();
    Tape tape;
    double batch_elbo = 0.0;
    {
      TapeScope scope(tape);
      Tensor total;
      for (std::size_t b = 0; b < config.batch_size; ++b) {
        if (cursor == order.size()) {
          std::shuffle(order.begin(), order.end(), rng);
          cursor = 0;
        }
        const TrainingExample & ex = train_set[order[cursor++]];
        const Tensor e = elbo(model, ex, rec.beta);
        if (!std::isfinite(e.item())) {
          std::ostringstream msg;
          msg << "train: non-finite ELBO at step " << step << " on play " << ex.play_id << " t=" << ex.t;
          throw RunError(msg.str());
        }
        total = b == 0 ? e : add(total, e);
      }
      const double inv = 1.0 / static_cast<double>(config.batch_size);
      batch_elbo = total.item() * inv;
      tape.backward(scale(total, -inv));
    }
    rec.train_elbo = batch_elbo;
    rec.grad_norm = clip_grad_norm(params, config.clip_norm > 0.0 ? config.clip_norm : INFINITY);
    if (!std::isfinite(rec.grad_norm)) {
      throw RunError("train: non-finite gradient norm at step " + std::to_string(step));
    }
    adam_step(params, opt);
    emit(std::move(rec));
  }

  MetricsRecord closing;
  closing.step = config.steps;
  closing.beta = kl_weight(config.steps, config.kl_anneal_steps);
  closing.val_nll = validate_now();
  result.final_val_nll = closing.val_nll;
  if (config.steps == 0) result.initial_val_nll = closing.val_nll;
  emit(std::move(closing));
  return result;
}

std::vector<NodeSamples> sample_futures(
  const GraphCvae & model, const TrainingExample & example, std::size_t count, std::uint64_t seed,
  const std::vector<NodeId> & nodes)
{
  NoGradScope no_grad;
  std::vector<NodeId> targets = nodes.empty() ? example.predicted_nodes() : nodes;
  for (NodeId n : targets) require_predicted(example, n);
  const auto fce = shared_future_encoding(model, example);
  const LatentSpec & latent = model.config().latent;
  const std::size_t horizon = example.horizon();

  std::vector<NodeSamples> out;
  for (NodeId n : targets) {
    const NodeWindow & w = example.node(n);
    NodeSamples ns{n, w.type, {}};
    if (count == 0) {
      out.push_back(std::move(ns));
      continue;
    }
    std::seed_seq seq{
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(n)};
    std::mt19937_64 rng(seq);

    const EncodingBundle bundle = model.encode(example, n, Phase::kInference, fce);
    const CategoricalFactors p = model.prior(bundle, w.type);
    std::vector<std::discrete_distribution<std::size_t>> dists;
    for (std::size_t v = 0; v < latent.variables; ++v) {
      const auto probs = p.probabilities(v);
      dists.emplace_back(probs.begin(), probs.end());
    }
    std::vector<std::size_t> joints(count);
    for (auto & j : joints) {
      std::vector<std::size_t> a(latent.variables);
      for (std::size_t v = 0; v < latent.variables; ++v) a[v] = dists[v](rng);
      j = latent.joint_index(a);
    }
    const auto rollouts = model.decode_sample(bundle, latent.one_hot(joints), w.last_action, horizon, w.type, rng);
    const CourtState start = propagate(w.current, w.last_action, example.dt);
    for (std::size_t s = 0; s < count; ++s) {
      SampledFuture f;
      f.joint_z = joints[s];
      f.assignment = latent.assignment(joints[s]);
      f.actions = rollouts[s];
      auto states = rollout(start, f.actions, example.dt);
      f.states.assign(states.begin() + 1, states.end());
      ns.samples.push_back(std::move(f));
    }
    out.push_back(std::move(ns));
  }
  return out;
}

}  // namespace trajgraph
