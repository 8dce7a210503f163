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

#ifndef TRAJGRAPH__PLAY_HPP_
#define TRAJGRAPH__PLAY_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trajgraph/dynamics.hpp"
#include "trajgraph/scene_graph.hpp"

namespace trajgraph
{

struct PlayerTrack
{
  NodeId id{0};
  Team team{Team::kHome};
  Role role{Role::kPG};
  std::vector<CourtState> positions;
  /// Hidden behaviour mode per frame; only present for synthetic plays.
  std::vector<int> modes;

  NodeType type() const { return NodeType::human(team, role); }
};

/// One contiguous stretch of tracked play. All tracks have equal length.
struct Play
{
  std::string play_id;
  std::string game_id;
  double dt{0.04};
  NodeId agent_id{0};
  std::vector<PlayerTrack> players;

  std::size_t frames() const { return players.empty() ? 0 : players.front().positions.size(); }
  const PlayerTrack & player(NodeId id) const;
};

/// JSON play file:
///
///   {"format_version": 1, "dt_ms": 40, "court": {"length_m": .., "width_m": ..},
///    "plays": [{"play_id": "..", "game_id": "..", "agent_id": 3,
///               "players": [{"id": 3, "team": "Home", "role": "PG",
///                            "xy": [[l, w], ...], "modes": [..]}]}]}
struct PlayFile
{
  static constexpr int kFormatVersion = 1;

  int format_version{kFormatVersion};
  double dt_ms{40.0};
  CourtSpec court;
  std::vector<Play> plays;
};

struct ParseOptions
{
  /// Clip out-of-court positions onto the boundary instead of rejecting them.
  bool clip_out_of_bounds{false};
};

PlayFile parse_plays(const std::filesystem::path & path, const ParseOptions & options = {});
PlayFile parse_plays_string(const std::string & text, const ParseOptions & options = {});
std::string write_plays_string(const PlayFile & file);
void write_plays(const std::filesystem::path & path, const PlayFile & file);

struct CsvImportOptions
{
  /// SportVU exports are in feet.
  bool coordinates_in_feet{true};
  double dt_ms{40.0};
  std::optional<NodeId> agent_id;
  CourtSpec court;
  bool clip_out_of_bounds{true};
};

/// SportVU-style CSV: header row with at least game_clock, player_id, x, y;
/// optional play_id, game_id, team, role. Rows sharing a game_clock value form
/// one frame. Players lacking team/role are typed Home C, PF, SF, SG, PG then
/// Away in order of first appearance.
PlayFile import_sportvu_csv(const std::filesystem::path & path, const CsvImportOptions & options = {});
PlayFile import_sportvu_csv_string(const std::string & text, const CsvImportOptions & options = {});

}  // namespace trajgraph

#endif  // TRAJGRAPH__PLAY_HPP_
