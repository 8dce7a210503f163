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

#include <filesystem>
#include <fstream>

#include "trajgraph/play.hpp"

namespace trajgraph
{
namespace
{

const char * kTwoPlayers = R"({
  "format_version": 1, "dt_ms": 40,
  "plays": [{"play_id": "p1", "game_id": "g1", "agent_id": 3,
             "players": [{"id": 3, "team": "Home", "role": "PG", "xy": [[1, 1], [1.1, 1], [1.2, 1]]},
                         {"id": 9, "team": "Away", "role": "C", "xy": [[5, 5], [5, 5.1], [5, 5.2]],
                          "modes": [0, 0, 1]}]}]})";

TEST(Play, ParsesJson)
{
  const PlayFile f = parse_plays_string(kTwoPlayers);
  ASSERT_EQ(f.plays.size(), 1u);
  const Play & p = f.plays[0];
  EXPECT_EQ(p.play_id, "p1");
  EXPECT_EQ(p.game_id, "g1");
  EXPECT_DOUBLE_EQ(p.dt, 0.04);
  EXPECT_EQ(p.agent_id, 3);
  EXPECT_EQ(p.frames(), 3u);
  EXPECT_EQ(p.player(9).type(), NodeType::human(Team::kAway, Role::kC));
  EXPECT_EQ(p.player(9).modes, (std::vector<int>{0, 0, 1}));
  EXPECT_DOUBLE_EQ(p.player(3).positions[2].l, 1.2);
  EXPECT_THROW(p.player(4), ContractError);
}

TEST(Play, WriteThenParseRoundTrips)
{
  const PlayFile a = parse_plays_string(kTwoPlayers);
  const std::string text = write_plays_string(a);
  const PlayFile b = parse_plays_string(text);
  EXPECT_EQ(write_plays_string(b), text);
  ASSERT_EQ(b.plays.size(), 1u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(b.plays[0].players[k].positions, a.plays[0].players[k].positions);
  }
}

TEST(Play, FileRoundTrip)
{
  const auto path = std::filesystem::temp_directory_path() / "trajgraph_play_test.json";
  write_plays(path, parse_plays_string(kTwoPlayers));
  EXPECT_EQ(parse_plays(path).plays[0].players[1].id, 9);
  std::filesystem::remove(path);
  EXPECT_THROW(parse_plays(path), ConfigError);
}

TEST(Play, RejectsMalformedInput)
{
  EXPECT_THROW(parse_plays_string("not json"), ConfigError);
  EXPECT_THROW(parse_plays_string(R"({"format_version": 2, "dt_ms": 40, "plays": []})"), ConfigError);
  EXPECT_THROW(parse_plays_string(R"({"format_version": 1, "dt_ms": 0, "plays": []})"), ConfigError);
  // unequal track lengths
  EXPECT_THROW(parse_plays_string(R"({"format_version": 1, "dt_ms": 40, "plays": [{"play_id": "a", "game_id": "g",
    "agent_id": 1, "players": [{"id": 1, "team": "Home", "role": "PG", "xy": [[1, 1], [1, 2]]},
                               {"id": 2, "team": "Home", "role": "C", "xy": [[1, 1]]}]}]})"),
               ConfigError);
  // agent missing
  EXPECT_THROW(parse_plays_string(R"({"format_version": 1, "dt_ms": 40, "plays": [{"play_id": "a", "game_id": "g",
    "agent_id": 7, "players": [{"id": 1, "team": "Home", "role": "PG", "xy": [[1, 1], [1, 2]]}]}]})"),
               ConfigError);
  // bad role
  EXPECT_THROW(parse_plays_string(R"({"format_version": 1, "dt_ms": 40, "plays": [{"play_id": "a", "game_id": "g",
    "agent_id": 1, "players": [{"id": 1, "team": "Home", "role": "QB", "xy": [[1, 1], [1, 2]]}]}]})"),
               ConfigError);
}

TEST(Play, OutOfCourtRejectedOrClipped)
{
  const std::string text = R"({"format_version": 1, "dt_ms": 40, "plays": [{"play_id": "a", "game_id": "g",
    "agent_id": 1, "players": [{"id": 1, "team": "Home", "role": "PG", "xy": [[1, 1], [30, -1]]}]}]})";
  EXPECT_THROW(parse_plays_string(text), ConfigError);
  const PlayFile f = parse_plays_string(text, ParseOptions{.clip_out_of_bounds = true});
  EXPECT_DOUBLE_EQ(f.plays[0].players[0].positions[1].l, 28.65);
  EXPECT_DOUBLE_EQ(f.plays[0].players[0].positions[1].w, 0.0);
}

TEST(Play, SportvuCsvImport)
{
  const std::string csv =
    "game_clock,player_id,x,y\n"
    "720.00,11,10,10\n"
    "720.00,12,20,20\n"
    "719.96,11,10.5,10\n"
    "719.96,12,20,20.5\n";
  const PlayFile f = import_sportvu_csv_string(csv);
  ASSERT_EQ(f.plays.size(), 1u);
  const Play & p = f.plays[0];
  EXPECT_DOUBLE_EQ(p.dt, 0.04);
  EXPECT_EQ(p.agent_id, 11);
  EXPECT_EQ(p.frames(), 2u);
  EXPECT_NEAR(p.player(11).positions[1].l, 10.5 * 0.3048, 1e-12);
  EXPECT_EQ(p.player(11).type(), NodeType::human(Team::kHome, Role::kC));
  EXPECT_EQ(p.player(12).type(), NodeType::human(Team::kHome, Role::kPF));
  EXPECT_THROW(import_sportvu_csv_string("game_clock,x,y\n1,2,3\n"), ConfigError);
  EXPECT_THROW(import_sportvu_csv_string("game_clock,player_id,x,y\n1,2,abc,3\n"), ConfigError);
  EXPECT_THROW(
    import_sportvu_csv_string("game_clock,player_id,x,y\n1,2,3,3\n1,3,3,3\n0.9,2,3,3\n"), ConfigError);
}

}  // namespace
}  // namespace trajgraph
