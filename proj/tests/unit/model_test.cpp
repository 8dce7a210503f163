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

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "trajgraph/model.hpp"

namespace trajgraph
{
namespace
{

using testing::small_model;

const NodeType kHomePg = NodeType::human(Team::kHome, Role::kPG);
const NodeType kAwayC = NodeType::human(Team::kAway, Role::kC);

struct TrackSpec
{
  NodeId id;
  NodeType type;
  CourtState start;
  CourtAction velocity;
};

/// One play of straight-line tracks; the first spec is the agent.
TrainingExample scene(const std::vector<TrackSpec> & specs, std::size_t H = 4, std::size_t S = 3, double radius = 3.0)
{
  Play p;
  p.play_id = "scene";
  p.agent_id = specs.front().id;
  for (const auto & s : specs) {
    PlayerTrack tr;
    tr.id = s.id;
    tr.team = s.type.team;
    tr.role = s.type.role;
    for (std::size_t f = 0; f < H + S + 1; ++f) {
      const double t = 0.04 * static_cast<double>(f);
      tr.positions.push_back({s.start.l + s.velocity.dl * t, s.start.w + s.velocity.dw * t});
    }
    p.players.push_back(tr);
  }
  const auto ex = window_dataset({p}, {.history = H, .horizon = S, .radius = radius});
  EXPECT_EQ(ex.size(), 1u);
  return ex.front();
}

TypeSet two_types() { return TypeSet{{kHomePg, kAwayC}}; }

TEST(LatentSpec, JointIndexRoundTrip)
{
  const LatentSpec spec{3, 4};
  EXPECT_EQ(spec.joint_size(), 64u);
  for (std::size_t j = 0; j < 64; ++j) EXPECT_EQ(spec.joint_index(spec.assignment(j)), j);
  EXPECT_EQ(spec.assignment(1), (std::vector<std::size_t>{0, 0, 1}));
  EXPECT_EQ(spec.assignment(16), (std::vector<std::size_t>{1, 0, 0}));
  const Tensor all = spec.enumerate();
  ASSERT_EQ(all.shape(), (Shape{64, 12}));
  for (std::size_t r = 0; r < 64; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < 12; ++c) total += all.at(r, c);
    EXPECT_EQ(total, 3.0);
  }
  EXPECT_THROW((LatentSpec{0, 3}.validate()), ConfigError);
  EXPECT_THROW((LatentSpec{13, 2}.validate()), ConfigError);
}

TEST(ModelEnums, ParseRoundTrip)
{
  for (auto a : {EdgeAggregation::kSum, EdgeAggregation::kMean}) EXPECT_EQ(parse_aggregation(to_string(a)), a);
  for (auto r : {InfluenceReducer::kBiLstm, InfluenceReducer::kSum, InfluenceReducer::kMax}) {
    EXPECT_EQ(parse_reducer(to_string(r)), r);
  }
  EXPECT_THROW(parse_aggregation("median"), ConfigError);
}

TEST(TypeSet, EdgeTypesCoverHumanPairsAndAgent)
{
  TypeSet ts{{kAwayC, kHomePg, kAwayC}};
  ts.normalize();
  ASSERT_EQ(ts.humans.size(), 2u);
  const auto edges = ts.edge_types();
  EXPECT_EQ(edges.size(), 3u + 2u);
  EXPECT_TRUE(ts.contains(kHomePg));
  EXPECT_FALSE(ts.contains(NodeType::human(Team::kHome, Role::kC)));
}

TEST(GraphCvae, ZeroWeightsGiveUniformPrior)
{
  GraphCvae model(small_model(2, 3, 2), two_types(), 1);
  for (auto t : model.registry().parameters())
    for (auto & v : t.mutable_values()) v = 0.0;
  const auto ex = scene({{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kHomePg, {6, 5}, {0, 1}}});
  const auto bundle = model.encode(ex, 1, Phase::kInference);
  const CategoricalFactors prior = model.prior(bundle, kHomePg);
  ASSERT_EQ(prior.log_probs.shape(), (Shape{2, 3}));
  for (double v : prior.log_probs.values()) EXPECT_NEAR(v, -std::log(3.0), 1e-15);
}

TEST(GraphCvae, DuplicatedNeighbourDoublesSumAndKeepsMean)
{
  const std::vector<TrackSpec> one{
    {0, NodeType::conditioning_agent(), {20, 10}, {0, 0}}, {1, kHomePg, {5, 5}, {1, 0}}, {2, kAwayC, {6, 5}, {0, 1}}};
  auto two = one;
  two.push_back({3, kAwayC, {6, 5}, {0, 1}});
  const auto ex1 = scene(one);
  const auto ex2 = scene(two);
  ModelConfig cfg = small_model(1, 2, 1);
  GraphCvae sum_model(cfg, two_types(), 1);
  cfg.aggregation = EdgeAggregation::kMean;
  GraphCvae mean_model(cfg, two_types(), 1);
  const EdgeType et(kHomePg, kAwayC);
  const auto s1 = sum_model.edge_inputs(ex1, 1).at(et);
  const auto s2 = sum_model.edge_inputs(ex2, 1).at(et);
  const auto m1 = mean_model.edge_inputs(ex1, 1).at(et);
  const auto m2 = mean_model.edge_inputs(ex2, 1).at(et);
  for (std::size_t k = 0; k < s1.size(); ++k)
    for (std::size_t d = 0; d < 4; ++d) {
      EXPECT_EQ(s2[k][d], 2.0 * s1[k][d]);
      EXPECT_EQ(m2[k][d], m1[k][d]);
    }
  // the node's own features never enter its edge inputs
  EXPECT_EQ(sum_model.edge_inputs(ex1, 1).size(), 1u);
}

TEST(GraphCvae, SumAndMaxReducers)
{
  ModelConfig cfg = small_model(1, 2, 1);
  cfg.reducer = InfluenceReducer::kSum;
  GraphCvae sum_model(cfg, two_types(), 1);
  cfg.reducer = InfluenceReducer::kMax;
  GraphCvae max_model(cfg, two_types(), 1);
  EXPECT_FALSE(sum_model.registry().has_key(GraphCvae::eie_key(kHomePg)));
  const Tensor v = Tensor::row({0.5, -1.0, 2.0});
  const Tensor seq[] = {v, neg(v)};
  const Tensor s = sum_model.encode_edge_influence(seq, kHomePg);
  const Tensor m = max_model.encode_edge_influence(seq, kHomePg);
  ASSERT_EQ(s.shape(), (Shape{1, 3}));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(s[i], 0.0);
    EXPECT_EQ(m[i], std::abs(v[i]));
  }
  const Tensor empty = max_model.encode_edge_influence(std::span<const Tensor>{}, kHomePg);
  for (double x : empty.values()) EXPECT_EQ(x, 0.0);
}

TEST(GraphCvae, FutureConditionalZeroUnlessAdjacent)
{
  GraphCvae model(small_model(1, 2, 1), two_types(), 1);
  testing::randomize(model, 4);
  const std::vector<Feature> fut(3, Feature{14.0, 7.0, 1.0, 0.0});
  const Tensor off = model.encode_future_conditional(fut, false);
  const Tensor on = model.encode_future_conditional(fut, true);
  ASSERT_EQ(off.shape(), (Shape{1, model.config().future_conditional_width()}));
  for (double x : off.values()) EXPECT_EQ(x, 0.0);
  double mass = 0.0;
  for (double x : on.values()) mass += std::abs(x);
  EXPECT_GT(mass, 0.0);
}

TEST(GraphCvae, NodeFutureEncoderOnlyRunsInTraining)
{
  GraphCvae model(small_model(1, 2, 1), two_types(), 1);
  const auto ex = scene({{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kHomePg, {6, 5}, {0, 1}}});
  model.registry().reset_access_log();
  const auto inf = model.encode(ex, 1, Phase::kInference);
  model.prior(inf, kHomePg);
  EXPECT_FALSE(inf.node_future.has_value());
  EXPECT_FALSE(model.registry().accessed_with_prefix("NFE/"));
  EXPECT_FALSE(model.registry().accessed_with_prefix("Posterior/"));
  EXPECT_THROW(model.encode_node_future(ex.node(1), Phase::kInference), ContractError);
  const auto train = model.encode(ex, 1, Phase::kTraining);
  EXPECT_TRUE(train.node_future.has_value());
  EXPECT_TRUE(model.registry().accessed_with_prefix("NFE/"));
}

TEST(GraphCvae, WidthsAndParametersIndependentOfSceneSize)
{
  const ModelConfig cfg = small_model(2, 2, 2);
  GraphCvae model(cfg, two_types(), 1);
  const std::size_t params = model.registry().parameter_count();
  std::vector<TrackSpec> specs{{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kHomePg, {6, 5}, {0, 1}}};
  for (NodeId id = 2; id < 9; ++id) {
    specs.push_back({id, id % 2 ? kHomePg : kAwayC, {5.0 + 0.3 * id, 5.5}, {0, -1}});
    const auto ex = scene(specs);
    for (NodeId n : ex.predicted_nodes()) {
      const auto b = model.encode(ex, n, Phase::kTraining);
      EXPECT_EQ(b.context().shape(), (Shape{1, cfg.context_width()}));
      EXPECT_EQ(b.node_future->shape(), (Shape{1, cfg.node_future_width()}));
    }
    EXPECT_EQ(model.registry().parameter_count(), params);
  }
}

TEST(GraphCvae, InvariantToNeighbourRelabelling)
{
  GraphCvae model(small_model(2, 2, 2), two_types(), 3);
  testing::randomize(model, 5);
  const TrackSpec agent{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}};
  const TrackSpec ego{1, kHomePg, {6, 5}, {0, 1}};
  const auto a = scene({agent, ego, {2, kAwayC, {6.5, 5}, {1, 1}}, {3, kAwayC, {5.5, 6}, {-1, 0}}});
  const auto b = scene({agent, ego, {2, kAwayC, {5.5, 6}, {-1, 0}}, {3, kAwayC, {6.5, 5}, {1, 1}}});
  const Tensor ca = model.encode(a, 1, Phase::kInference).context();
  const Tensor cb = model.encode(b, 1, Phase::kInference).context();
  for (std::size_t i = 0; i < ca.size(); ++i) EXPECT_NEAR(ca[i], cb[i], 1e-12);
}

TEST(GraphCvae, UnknownTypeIsRejected)
{
  GraphCvae model(small_model(1, 2, 1), TypeSet{{kHomePg}}, 1);
  const auto ex = scene({{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kAwayC, {6, 5}, {0, 1}}});
  EXPECT_THROW(model.encode(ex, 1, Phase::kInference), ContractError);
}

TEST(GraphCvae, TeacherForcedHeadShapesAndScaleClamp)
{
  ModelConfig cfg = small_model(2, 3, 4);
  GraphCvae model(cfg, two_types(), 2);
  testing::randomize(model, 9, 3.0);
  const auto ex = scene({{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kHomePg, {6, 5}, {0, 1}}});
  const auto b = model.encode(ex, 1, Phase::kTraining);
  const auto heads =
    model.decode_teacher_forced(b, cfg.latent.enumerate(), ex.node(1).last_action, ex.node(1).future, kHomePg);
  ASSERT_EQ(heads.size(), 3u);
  for (const auto & h : heads) {
    EXPECT_EQ(h.log_weights.shape(), (Shape{9, 4}));
    EXPECT_EQ(h.means.shape(), (Shape{9, 4, 2}));
    for (double s : h.log_scales.values()) {
      EXPECT_GE(s, cfg.log_scale_min);
      EXPECT_LE(s, cfg.log_scale_max);
    }
    for (std::size_t r = 0; r < 9; ++r) {
      double total = 0.0;
      for (std::size_t k = 0; k < 4; ++k) total += std::exp(h.log_weights.at(r, k));
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(GraphCvae, CheckpointRoundTripPreservesOutputs)
{
  GraphCvae model(small_model(2, 2, 2), two_types(), 6);
  testing::randomize(model, 1);
  const auto ex = scene({{0, NodeType::conditioning_agent(), {5, 5}, {1, 0}}, {1, kHomePg, {6, 5}, {0, 1}}});
  const GraphCvae back = GraphCvae::from_checkpoint(decode_checkpoint(encode_checkpoint(model.to_checkpoint())));
  EXPECT_EQ(back.config().decoder_hidden, model.config().decoder_hidden);
  const Tensor a = model.prior(model.encode(ex, 1, Phase::kInference), kHomePg).log_probs;
  const Tensor b = back.prior(back.encode(ex, 1, Phase::kInference), kHomePg).log_probs;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

}  // namespace
}  // namespace trajgraph
