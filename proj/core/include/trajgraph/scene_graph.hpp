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

#ifndef TRAJGRAPH__SCENE_GRAPH_HPP_
#define TRAJGRAPH__SCENE_GRAPH_HPP_

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "trajgraph/dynamics.hpp"

namespace trajgraph
{

enum class Team { kHome, kAway };
enum class Role { kC, kPF, kSF, kSG, kPG };

/// (team, role) for humans; the conditioning agent carries its own marker
/// and never shares a type with a human.
struct NodeType
{
  Team team{Team::kHome};
  Role role{Role::kPG};
  bool agent{false};

  static NodeType human(Team team, Role role) { return {team, role, false}; }
  static NodeType conditioning_agent() { return {Team::kHome, Role::kPG, true}; }

  /// "Home-PG", "Away-C", or "Agent".
  std::string name() const;
  static NodeType parse(const std::string & name);

  friend bool operator==(const NodeType & a, const NodeType & b) { return a.name() == b.name(); }
  friend auto operator<=>(const NodeType & a, const NodeType & b) { return a.name() <=> b.name(); }
};

std::string to_string(Team team);
std::string to_string(Role role);
Team parse_team(const std::string & s);
Role parse_role(const std::string & s);

/// Every human (team, role) combination, in name order.
std::vector<NodeType> all_human_types();

/// Unordered pair of node types. Stored sorted by name, so EdgeType(a, b) and
/// EdgeType(b, a) are the same value.
class EdgeType
{
public:
  EdgeType(const NodeType & a, const NodeType & b);

  const NodeType & first() const { return first_; }
  const NodeType & second() const { return second_; }
  /// "Away-C—Home-PG" (names joined by an em dash, sorted).
  std::string key() const;

  friend bool operator==(const EdgeType & a, const EdgeType & b) { return a.key() == b.key(); }
  friend auto operator<=>(const EdgeType & a, const EdgeType & b) { return a.key() <=> b.key(); }

private:
  NodeType first_;
  NodeType second_;
};

using NodeId = int;

struct GraphNode
{
  NodeType type;
  CourtState state;
};

/// Undirected proximity graph frozen at one prediction timestep.
class SceneGraph
{
public:
  SceneGraph() = default;

  const std::map<NodeId, GraphNode> & nodes() const { return nodes_; }
  /// Unordered pairs stored as (smaller id, larger id).
  const std::set<std::pair<NodeId, NodeId>> & edges() const { return edges_; }
  double radius() const { return radius_; }

  bool contains(NodeId id) const { return nodes_.count(id) != 0; }
  const GraphNode & node(NodeId id) const;
  bool has_edge(NodeId a, NodeId b) const;
  /// Ascending ids.
  std::vector<NodeId> neighbors(NodeId id) const;
  std::size_t degree(NodeId id) const;

private:
  friend SceneGraph build_graph(
    const std::map<NodeId, CourtState> &, const std::map<NodeId, NodeType> &, double);

  std::map<NodeId, GraphNode> nodes_;
  std::set<std::pair<NodeId, NodeId>> edges_;
  std::map<NodeId, std::vector<NodeId>> adjacency_;
  double radius_{0.0};
};

/// Edge (i, j) iff i != j and distance <= radius.
SceneGraph build_graph(
  const std::map<NodeId, CourtState> & states, const std::map<NodeId, NodeType> & types, double radius);

/// Neighbors grouped by edge type; ids ascending within each bucket.
std::map<EdgeType, std::vector<NodeId>> neighbors_by_edge_type(const SceneGraph & graph, NodeId node);

bool agent_adjacent(const SceneGraph & graph, NodeId node, NodeId agent_id);

}  // namespace trajgraph

#endif  // TRAJGRAPH__SCENE_GRAPH_HPP_
