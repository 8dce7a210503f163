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

#ifndef TRAJGRAPH__DATASET_HPP_
#define TRAJGRAPH__DATASET_HPP_

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "trajgraph/play.hpp"
#include "trajgraph/scene_graph.hpp"

namespace trajgraph
{

/// Per-timestep node input: [l, w, dl, dw] in meters and m/s.
using Feature = std::array<double, 4>;

Feature make_feature(const CourtState & x, const CourtAction & u);

struct NodeWindow
{
  NodeId id{0};
  NodeType type;
  /// States and actions at t-H+1 .. t.
  std::vector<Feature> history;
  /// Ground-truth actions at t+1 .. t+S (the prediction target).
  std::vector<CourtAction> future;
  /// States and actions at t+1 .. t+S.
  std::vector<Feature> future_features;
  CourtState current;
  CourtAction last_action;
  /// Generator mode at t+1 .. t+S when the source play carries modes.
  std::vector<int> future_modes;
};

/// One prediction problem at timestep t of a play. `nodes` holds every
/// player, the conditioning agent included, in ascending id order.
struct TrainingExample
{
  std::string play_id;
  std::size_t t{0};
  double dt{0.04};
  NodeId agent_id{0};
  std::vector<NodeWindow> nodes;
  /// Candidate agent future: agent states and actions at t+1 .. t+S.
  std::vector<Feature> agent_future;
  SceneGraph graph;

  const NodeWindow & node(NodeId id) const;
  /// Ids of the nodes whose futures are predicted (every non-agent node).
  std::vector<NodeId> predicted_nodes() const;
  std::size_t history_length() const;
  std::size_t horizon() const;
};

struct WindowConfig
{
  std::size_t history{8};
  std::size_t horizon{15};
  double radius{2.0};
};

/// Number of examples a play with `frames` frames yields: with T = frames - 1
/// recorded actions, T - S - H + 1 (zero when negative).
std::size_t window_count(std::size_t frames, std::size_t history, std::size_t horizon);

/// Slides a window over each play. Plays shorter than H + S + 1 frames are
/// skipped and reported through `warn`.
std::vector<TrainingExample> window_dataset(
  const std::vector<Play> & plays, const WindowConfig & config,
  const std::function<void(const std::string &)> & warn = {});

/// Replaces the agent's candidate future (and its graph-time state is kept).
TrainingExample with_agent_future(const TrainingExample & example, std::vector<Feature> agent_future);

}  // namespace trajgraph

#endif  // TRAJGRAPH__DATASET_HPP_
