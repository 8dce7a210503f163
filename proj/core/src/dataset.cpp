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

#include "trajgraph/dataset.hpp"

#include <algorithm>
#include <iostream>
#include <map>

namespace trajgraph
{

Feature make_feature(const CourtState & x, const CourtAction & u) { return {x.l, x.w, u.dl, u.dw}; }

const NodeWindow & TrainingExample::node(NodeId id) const
{
  for (const auto & n : nodes) {
    if (n.id == id) return n;
  }
  throw ContractError("example '" + play_id + "'@" + std::to_string(t) + ": unknown node " + std::to_string(id));
}

std::vector<NodeId> TrainingExample::predicted_nodes() const
{
  std::vector<NodeId> out;
  for (const auto & n : nodes) {
    if (n.id != agent_id) out.push_back(n.id);
  }
  return out;
}

std::size_t TrainingExample::history_length() const { return nodes.empty() ? 0 : nodes.front().history.size(); }
std::size_t TrainingExample::horizon() const { return agent_future.size(); }

std::size_t window_count(std::size_t frames, std::size_t history, std::size_t horizon)
{
  if (frames < history + horizon + 1) return 0;
  return frames - 1 - horizon - history + 1;
}

std::vector<TrainingExample> window_dataset(
  const std::vector<Play> & plays, const WindowConfig & config,
  const std::function<void(const std::string &)> & warn)
{
  if (config.history < 1 || config.horizon < 1) {
    throw ContractError("window_dataset: history and horizon must be at least 1");
  }
  const std::size_t H = config.history;
  const std::size_t S = config.horizon;
  std::vector<TrainingExample> out;
  for (const auto & play : plays) {
    const std::size_t frames = play.frames();
    if (window_count(frames, H, S) == 0) {
      const std::string msg = "window_dataset: skipping play '" + play.play_id + "' with " +
                              std::to_string(frames) + " frames (needs " + std::to_string(H + S + 1) + ")";
      if (warn) {
        warn(msg);
      } else {
        std::cerr << "warning: " << msg << "\n";
      }
      continue;
    }
    std::map<NodeId, Trajectory> trajs;
    std::map<NodeId, NodeType> types;
    for (const auto & p : play.players) {
      trajs.emplace(p.id, make_trajectory(p.positions, play.dt));
      types.emplace(p.id, p.id == play.agent_id ? NodeType::conditioning_agent() : p.type());
    }
    const std::size_t T = frames - 1;
    for (std::size_t t = H - 1; t + S <= T - 1; ++t) {
      TrainingExample ex;
      ex.play_id = play.play_id;
      ex.t = t;
      ex.dt = play.dt;
      ex.agent_id = play.agent_id;
      std::map<NodeId, CourtState> states;
      for (const auto & p : play.players) {
        const Trajectory & tr = trajs.at(p.id);
        NodeWindow w;
        w.id = p.id;
        w.type = types.at(p.id);
        for (std::size_t k = t + 1 - H; k <= t; ++k) w.history.push_back(make_feature(tr.states[k], tr.actions[k]));
        for (std::size_t k = t + 1; k <= t + S; ++k) {
          w.future.push_back(tr.actions[k]);
          w.future_features.push_back(make_feature(tr.states[k], tr.actions[k]));
          if (!p.modes.empty()) w.future_modes.push_back(p.modes[k]);
        }
        w.current = tr.states[t];
        w.last_action = tr.actions[t];
        states.emplace(p.id, w.current);
        if (p.id == play.agent_id) ex.agent_future = w.future_features;
        ex.nodes.push_back(std::move(w));
      }
      std::sort(ex.nodes.begin(), ex.nodes.end(), [](const auto & a, const auto & b) { return a.id < b.id; });
      ex.graph = build_graph(states, types, config.radius);
      out.push_back(std::move(ex));
    }
  }
  return out;
}

TrainingExample with_agent_future(const TrainingExample & example, std::vector<Feature> agent_future)
{
  if (agent_future.size() != example.agent_future.size()) {
    throw DimensionError("with_agent_future: candidate future length differs from the example horizon");
  }
  TrainingExample out = example;
  out.agent_future = std::move(agent_future);
  return out;
}

}  // namespace trajgraph
