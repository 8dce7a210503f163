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

#ifndef TRAJGRAPH__MODEL_HPP_
#define TRAJGRAPH__MODEL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "trajgraph/checkpoint.hpp"
#include "trajgraph/dataset.hpp"
#include "trajgraph/gmm.hpp"
#include "trajgraph/lstm.hpp"
#include "trajgraph/registry.hpp"
#include "trajgraph/scene_graph.hpp"

namespace trajgraph
{

/// How neighbour features of one edge type are combined before the EE.
enum class EdgeAggregation { kSum, kMean };
/// How per-edge-type encodings are merged into one influence vector.
enum class InfluenceReducer { kBiLstm, kSum, kMax };
enum class Phase { kTraining, kInference };

std::string to_string(EdgeAggregation a);
std::string to_string(InfluenceReducer r);
EdgeAggregation parse_aggregation(const std::string & s);
InfluenceReducer parse_reducer(const std::string & s);

/// `variables` independent categorical latents with `categories` values each.
struct LatentSpec
{
  static constexpr std::size_t kMaxJointAssignments = 4096;

  std::size_t variables{2};
  std::size_t categories{5};

  /// categories ^ variables.
  std::size_t joint_size() const;
  void validate() const;
  /// Digits of a joint index, first variable most significant.
  std::vector<std::size_t> assignment(std::size_t joint_index) const;
  std::size_t joint_index(std::span<const std::size_t> assignment) const;
  /// [rows x variables*categories] block of concatenated one-hot segments.
  Tensor one_hot(std::span<const std::size_t> joint_indices) const;
  /// one_hot over every joint assignment in index order.
  Tensor enumerate() const;
};

/// Affine normalisation applied to raw [l, w, dl, dw] features before any
/// encoder sees them.
struct FeatureScaling
{
  double center_l{14.325};
  double center_w{7.62};
  double position_scale{5.0};
  double velocity_scale{4.0};

  Feature apply(const Feature & f) const;
};

struct ModelConfig
{
  std::size_t ee_hidden{8};
  std::size_t eie_hidden{8};
  std::size_t nhe_hidden{32};
  std::size_t fce_hidden{32};
  std::size_t nfe_hidden{32};
  std::size_t decoder_hidden{128};
  std::size_t gmm_components{16};
  LatentSpec latent;
  EdgeAggregation aggregation{EdgeAggregation::kSum};
  InfluenceReducer reducer{InfluenceReducer::kBiLstm};
  FeatureScaling scaling;
  double log_scale_min{-5.0};
  double log_scale_max{2.0};

  std::size_t influence_width() const;
  std::size_t future_conditional_width() const { return 4 * fce_hidden; }
  std::size_t node_future_width() const { return 4 * nfe_hidden; }
  /// Width of [edge influence | history | future conditional].
  std::size_t context_width() const;
  void validate() const;
};

/// Declared node-type vocabulary. Registry contents are a function of this
/// set alone, never of how many nodes a scene has.
struct TypeSet
{
  std::vector<NodeType> humans;

  static TypeSet from_plays(const std::vector<Play> & plays);
  static TypeSet from_examples(const std::vector<TrainingExample> & examples);
  /// Every unordered human pair plus each human paired with the agent.
  std::vector<EdgeType> edge_types() const;
  bool contains(const NodeType & t) const;
  void normalize();
};

struct EncodingBundle
{
  Tensor edge_influence;
  Tensor history;
  Tensor future_conditional;
  /// Present only when encoded for training.
  std::optional<Tensor> node_future;

  /// [edge influence | history | future conditional], shape [1 x C].
  Tensor context() const;
};

/// Per-variable log-probabilities, shape [variables x categories].
struct CategoricalFactors
{
  Tensor log_probs;

  std::size_t variables() const { return log_probs.dim(0); }
  std::size_t categories() const { return log_probs.dim(1); }
  std::vector<double> probabilities(std::size_t variable) const;
  /// log q(z) for each row of a one-hot block, shape [rows].
  Tensor joint_log_prob(const Tensor & one_hot) const;
};

/// Graph-structured CVAE with per-type weight sharing. A single instance
/// serves every node of every scene drawn from its TypeSet.
class GraphCvae
{
public:
  GraphCvae(ModelConfig config, TypeSet types, std::uint64_t seed);

  const ModelConfig & config() const { return config_; }
  const TypeSet & types() const { return types_; }
  std::uint64_t seed() const { return seed_; }
  WeightRegistry & registry() { return registry_; }
  const WeightRegistry & registry() const { return registry_; }

  static std::string ee_key(const EdgeType & t) { return "EE/" + t.key(); }
  static std::string eie_key(const NodeType & t) { return "EIE/" + t.name(); }
  static std::string nhe_key(const NodeType & t) { return "NHE/" + t.name(); }
  static std::string nfe_key(const NodeType & t) { return "NFE/" + t.name(); }
  static std::string fce_key() { return "FCE/global"; }
  static std::string decoder_key(const NodeType & t) { return "Decoder/" + t.name(); }
  static std::string prior_key(const NodeType & t) { return "Prior/" + t.name(); }
  static std::string posterior_key(const NodeType & t) { return "Posterior/" + t.name(); }

  /// Per-step EE input for every edge type around `node`: normalised
  /// neighbour features summed (or averaged) at each history step.
  std::map<EdgeType, std::vector<Feature>> edge_inputs(const TrainingExample & example, NodeId node) const;
  /// Final EE hidden state per edge type present around `node`.
  std::map<EdgeType, Tensor> encode_edges(const TrainingExample & example, NodeId node) const;
  /// Reduces edge encodings in canonical key order; zero vector when empty.
  Tensor encode_edge_influence(const std::map<EdgeType, Tensor> & edge_encodings, const NodeType & type) const;
  Tensor encode_edge_influence(std::span<const Tensor> edge_encodings, const NodeType & type) const;
  Tensor encode_history(const NodeWindow & node) const;
  Tensor encode_future_conditional(std::span<const Feature> agent_future, bool adjacent) const;
  /// Training only; throws ContractError for Phase::kInference.
  Tensor encode_node_future(const NodeWindow & node, Phase phase) const;

  /// `fce` may carry a precomputed non-zero FCE output shared by all
  /// agent-adjacent nodes of one example.
  EncodingBundle encode(
    const TrainingExample & example, NodeId node, Phase phase, const std::optional<Tensor> & fce = std::nullopt) const;

  CategoricalFactors prior(const EncodingBundle & bundle, const NodeType & type) const;
  CategoricalFactors posterior(const EncodingBundle & bundle, const NodeType & type) const;

  LstmState decoder_initial_state(const EncodingBundle & bundle, const Tensor & z_one_hot, const NodeType & type) const;
  /// Mixture head per horizon step, one row per row of `z_one_hot`, with the
  /// true previous action fed back at each step. Horizon = future.size().
  std::vector<GmmHead> decode_teacher_forced(
    const EncodingBundle & bundle, const Tensor & z_one_hot, const CourtAction & last_action,
    std::span<const CourtAction> future, const NodeType & type) const;
  /// Sampled rollouts, one per row of `z_one_hot`; actions are speed-clamped.
  std::vector<std::vector<CourtAction>> decode_sample(
    const EncodingBundle & bundle, const Tensor & z_one_hot, const CourtAction & last_action, std::size_t horizon,
    const NodeType & type, std::mt19937_64 & rng) const;
  /// Plain mixture parameters for one joint latent assignment. With
  /// `teacher` the true actions are fed back; otherwise actions are sampled
  /// from `rng`.
  GMMParams decode_gmm(
    const EncodingBundle & bundle, std::size_t joint_z, const CourtAction & last_action, std::size_t horizon,
    const NodeType & type, std::optional<std::span<const CourtAction>> teacher, std::mt19937_64 * rng) const;

  Checkpoint to_checkpoint() const;
  static GraphCvae from_checkpoint(const Checkpoint & checkpoint);
  std::string metadata_json() const;

  /// Profiling comparison only: one EE with private weights per graph edge
  /// instead of one shared EE per edge type.
  void enable_per_edge_encoders(const std::vector<TrainingExample> & scenes);
  bool per_edge_encoders() const { return per_edge_; }

private:
  GmmHead head(const Tensor & hidden, const NodeType & type) const;
  Tensor feature_row(const Feature & f) const;
  Tensor action_row(const CourtAction & u, std::size_t rows) const;
  const NodeType & require_type(const NodeType & t) const;

  ModelConfig config_;
  TypeSet types_;
  std::uint64_t seed_;
  WeightRegistry registry_;
  bool per_edge_{false};
};

}  // namespace trajgraph

#endif  // TRAJGRAPH__MODEL_HPP_
