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

#include "trajgraph/scene_graph.hpp"

#include <algorithm>
#include <array>

namespace trajgraph
{

std::string to_string(Team team) { return team == Team::kHome ? "Home" : "Away"; }

std::string to_string(Role role)
{
  switch (role) {
    case Role::kC: return "C";
    case Role::kPF: return "PF";
    case Role::kSF: return "SF";
    case Role::kSG: return "SG";
    case Role::kPG: return "PG";
  }
  return "?";
}

Team parse_team(const std::string & s)
{
  if (s == "Home") return Team::kHome;
  if (s == "Away") return Team::kAway;
  throw ConfigError("unknown team '" + s + "' (expected Home or Away)");
}

Role parse_role(const std::string & s)
{
  static const std::array<std::pair<const char *, Role>, 5> kRoles{{
    {"C", Role::kC}, {"PF", Role::kPF}, {"SF", Role::kSF}, {"SG", Role::kSG}, {"PG", Role::kPG}}};
  for (const auto & [name, role] : kRoles) {
    if (s == name) return role;
  }
  throw ConfigError("unknown role '" + s + "' (expected C, PF, SF, SG or PG)");
}

std::string NodeType::name() const
{
  if (agent) return "Agent";
  return to_string(team) + "-" + to_string(role);
}

NodeType NodeType::parse(const std::string & name)
{
  if (name == "Agent") return conditioning_agent();
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw ConfigError("malformed node type '" + name + "'");
  return human(parse_team(name.substr(0, dash)), parse_role(name.substr(dash + 1)));
}

std::vector<NodeType> all_human_types()
{
  std::vector<NodeType> out;
  for (Team t : {Team::kHome, Team::kAway})
    for (Role r : {Role::kC, Role::kPF, Role::kSF, Role::kSG, Role::kPG}) out.push_back(NodeType::human(t, r));
  std::sort(out.begin(), out.end());
  return out;
}

EdgeType::EdgeType(const NodeType & a, const NodeType & b)
: first_(a.name() <= b.name() ? a : b), second_(a.name() <= b.name() ? b : a)
{
}

std::string EdgeType::key() const { return first_.name() + "\xE2\x80\x94" + second_.name(); }

const GraphNode & SceneGraph::node(NodeId id) const
{
  const auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ContractError("scene graph: unknown node id " + std::to_string(id));
  return it->second;
}

bool SceneGraph::has_edge(NodeId a, NodeId b) const
{
  return edges_.count({std::min(a, b), std::max(a, b)}) != 0;
}

std::vector<NodeId> SceneGraph::neighbors(NodeId id) const
{
  node(id);
  const auto it = adjacency_.find(id);
  return it == adjacency_.end() ? std::vector<NodeId>{} : it->second;
}

std::size_t SceneGraph::degree(NodeId id) const { return neighbors(id).size(); }

SceneGraph build_graph(
  const std::map<NodeId, CourtState> & states, const std::map<NodeId, NodeType> & types, double radius)
{
  if (!(radius > 0.0)) throw DomainError("build_graph: radius must be positive, got " + std::to_string(radius));
  if (states.empty()) throw ContractError("build_graph: scene has no nodes");
  SceneGraph g;
  g.radius_ = radius;
  for (const auto & [id, x] : states) {
    const auto t = types.find(id);
    if (t == types.end()) throw ContractError("build_graph: no type for node " + std::to_string(id));
    g.nodes_.emplace(id, GraphNode{t->second, x});
    g.adjacency_[id];
  }
  for (auto a = states.begin(); a != states.end(); ++a) {
    for (auto b = std::next(a); b != states.end(); ++b) {
      if (distance(a->second, b->second) <= radius) {
        g.edges_.emplace(a->first, b->first);
        g.adjacency_[a->first].push_back(b->first);
        g.adjacency_[b->first].push_back(a->first);
      }
    }
  }
  for (auto & [id, nbrs] : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

std::map<EdgeType, std::vector<NodeId>> neighbors_by_edge_type(const SceneGraph & graph, NodeId node)
{
  const NodeType & own = graph.node(node).type;
  std::map<EdgeType, std::vector<NodeId>> buckets;
  for (NodeId n : graph.neighbors(node)) buckets[EdgeType(own, graph.node(n).type)].push_back(n);
  return buckets;
}

bool agent_adjacent(const SceneGraph & graph, NodeId node, NodeId agent_id)
{
  graph.node(node);
  graph.node(agent_id);
  return graph.has_edge(node, agent_id);
}

}  // namespace trajgraph
