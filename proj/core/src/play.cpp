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

#include "trajgraph/play.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace trajgraph
{

using json = nlohmann::json;

const PlayerTrack & Play::player(NodeId id) const
{
  for (const auto & p : players) {
    if (p.id == id) return p;
  }
  throw ContractError("play '" + play_id + "': unknown player id " + std::to_string(id));
}

namespace
{

std::string read_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename T>
T field(const json & obj, const char * key, const std::string & ctx)
{
  if (!obj.is_object() || !obj.contains(key)) throw ConfigError(ctx + ": missing field '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception & e) {
    throw ConfigError(ctx + ": field '" + key + "' has wrong type (" + e.what() + ")");
  }
}

void check_positions(std::vector<CourtState> & xs, const CourtSpec & court, bool clip, const std::string & ctx)
{
  for (std::size_t f = 0; f < xs.size(); ++f) {
    if (!std::isfinite(xs[f].l) || !std::isfinite(xs[f].w)) {
      throw ConfigError(ctx + ": frame " + std::to_string(f) + " has a non-finite coordinate");
    }
    if (!court.contains(xs[f])) {
      if (!clip) {
        throw ConfigError(
          ctx + ": frame " + std::to_string(f) + " position (" + std::to_string(xs[f].l) + ", " +
          std::to_string(xs[f].w) + ") lies outside the court");
      }
      xs[f] = court.clip(xs[f]);
    }
  }
}

void validate_play(Play & play, const CourtSpec & court, bool clip, const std::string & ctx)
{
  if (play.players.empty()) throw ConfigError(ctx + ": play has no players");
  std::set<NodeId> ids;
  const std::size_t frames = play.players.front().positions.size();
  for (auto & p : play.players) {
    const std::string pctx = ctx + " player " + std::to_string(p.id);
    if (!ids.insert(p.id).second) throw ConfigError(pctx + ": duplicate player id");
    if (p.positions.size() != frames) {
      throw ConfigError(
        pctx + ": has " + std::to_string(p.positions.size()) + " frames, expected " + std::to_string(frames));
    }
    if (!p.modes.empty() && p.modes.size() != frames) {
      throw ConfigError(pctx + ": modes length differs from xy length");
    }
    check_positions(p.positions, court, clip, pctx);
  }
  if (frames < 2) throw ConfigError(ctx + ": plays need at least 2 frames");
  if (!ids.count(play.agent_id)) {
    throw ConfigError(ctx + ": agent_id " + std::to_string(play.agent_id) + " is not one of the players");
  }
}

}  // namespace

PlayFile parse_plays_string(const std::string & text, const ParseOptions & options)
{
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error & e) {
    throw ConfigError(std::string("play file: ") + e.what());
  }
  PlayFile file;
  file.format_version = field<int>(doc, "format_version", "play file header");
  if (file.format_version != PlayFile::kFormatVersion) {
    throw ConfigError("play file: unsupported format_version " + std::to_string(file.format_version));
  }
  file.dt_ms = field<double>(doc, "dt_ms", "play file header");
  if (!(file.dt_ms > 0.0)) throw ConfigError("play file: dt_ms must be positive");
  if (doc.contains("court")) {
    file.court.length = field<double>(doc["court"], "length_m", "play file court");
    file.court.width = field<double>(doc["court"], "width_m", "play file court");
    if (!(file.court.length > 0.0 && file.court.width > 0.0)) throw ConfigError("play file: court extents must be positive");
  }
  const auto plays = field<json>(doc, "plays", "play file");
  if (!plays.is_array()) throw ConfigError("play file: 'plays' must be an array");
  for (std::size_t i = 0; i < plays.size(); ++i) {
    const json & pj = plays[i];
    std::string ctx = "play record " + std::to_string(i);
    Play play;
    play.play_id = field<std::string>(pj, "play_id", ctx);
    ctx += " ('" + play.play_id + "')";
    if (pj.contains("game_id")) play.game_id = field<std::string>(pj, "game_id", ctx);
    play.agent_id = field<NodeId>(pj, "agent_id", ctx);
    play.dt = file.dt_ms / 1000.0;
    const auto players = field<json>(pj, "players", ctx);
    if (!players.is_array()) throw ConfigError(ctx + ": 'players' must be an array");
    for (std::size_t k = 0; k < players.size(); ++k) {
      const json & tj = players[k];
      const std::string tctx = ctx + " player record " + std::to_string(k);
      PlayerTrack track;
      track.id = field<NodeId>(tj, "id", tctx);
      track.team = parse_team(field<std::string>(tj, "team", tctx));
      track.role = parse_role(field<std::string>(tj, "role", tctx));
      const auto xy = field<json>(tj, "xy", tctx);
      if (!xy.is_array()) throw ConfigError(tctx + ": 'xy' must be an array");
      for (std::size_t f = 0; f < xy.size(); ++f) {
        if (!xy[f].is_array() || xy[f].size() != 2 || !xy[f][0].is_number() || !xy[f][1].is_number()) {
          throw ConfigError(tctx + ": xy frame " + std::to_string(f) + " is not an [l, w] pair");
        }
        track.positions.push_back({xy[f][0].get<double>(), xy[f][1].get<double>()});
      }
      if (tj.contains("modes")) track.modes = field<std::vector<int>>(tj, "modes", tctx);
      play.players.push_back(std::move(track));
    }
    validate_play(play, file.court, options.clip_out_of_bounds, ctx);
    file.plays.push_back(std::move(play));
  }
  return file;
}

PlayFile parse_plays(const std::filesystem::path & path, const ParseOptions & options)
{
  return parse_plays_string(read_file(path), options);
}

std::string write_plays_string(const PlayFile & file)
{
  json doc;
  doc["format_version"] = file.format_version;
  doc["dt_ms"] = file.dt_ms;
  doc["court"] = {{"length_m", file.court.length}, {"width_m", file.court.width}};
  doc["plays"] = json::array();
  for (const auto & play : file.plays) {
    json pj;
    pj["play_id"] = play.play_id;
    if (!play.game_id.empty()) pj["game_id"] = play.game_id;
    pj["agent_id"] = play.agent_id;
    pj["players"] = json::array();
    for (const auto & t : play.players) {
      json tj;
      tj["id"] = t.id;
      tj["team"] = to_string(t.team);
      tj["role"] = to_string(t.role);
      json xy = json::array();
      for (const auto & x : t.positions) xy.push_back({x.l, x.w});
      tj["xy"] = std::move(xy);
      if (!t.modes.empty()) tj["modes"] = t.modes;
      pj["players"].push_back(std::move(tj));
    }
    doc["plays"].push_back(std::move(pj));
  }
  return doc.dump() + "\n";
}

void write_plays(const std::filesystem::path & path, const PlayFile & file)
{
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << write_plays_string(file);
}

// ---- SportVU CSV ------------------------------------------------------------------

namespace
{
std::vector<std::string> split_csv_line(const std::string & line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string & s, const std::string & ctx)
{
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw ConfigError(ctx + ": '" + s + "' is not a number");
  }
}
}  // namespace

PlayFile import_sportvu_csv_string(const std::string & text, const CsvImportOptions & options)
{
  constexpr double kFeetToMeters = 0.3048;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> col;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    break;
  }
  for (const char * required : {"game_clock", "player_id", "x", "y"}) {
    if (!col.count(required)) throw ConfigError(std::string("csv: missing required column '") + required + "'");
  }
  auto cell = [&](const std::vector<std::string> & row, const char * name) -> std::optional<std::string> {
    const auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return std::nullopt;
    return row[it->second];
  };

  struct Frame
  {
    std::string clock;
    std::map<NodeId, CourtState> positions;
  };
  struct PendingPlay
  {
    std::string game_id;
    std::vector<Frame> frames;
    std::vector<NodeId> order;
    std::map<NodeId, std::pair<std::optional<std::string>, std::optional<std::string>>> labels;
  };
  std::vector<std::string> play_order;
  std::map<std::string, PendingPlay> pending;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string ctx = "csv line " + std::to_string(line_no);
    const auto row = split_csv_line(line);
    const std::string play_id = cell(row, "play_id").value_or("play-0");
    if (!pending.count(play_id)) play_order.push_back(play_id);
    auto & pp = pending[play_id];
    if (auto g = cell(row, "game_id")) pp.game_id = *g;
    const std::string clock = cell(row, "game_clock").value_or("");
    if (clock.empty()) throw ConfigError(ctx + ": empty game_clock");
    if (pp.frames.empty() || pp.frames.back().clock != clock) pp.frames.push_back(Frame{clock, {}});
    const auto id = static_cast<NodeId>(parse_number(cell(row, "player_id").value_or(""), ctx + " player_id"));
    double l = parse_number(cell(row, "x").value_or(""), ctx + " x");
    double w = parse_number(cell(row, "y").value_or(""), ctx + " y");
    if (options.coordinates_in_feet) {
      l *= kFeetToMeters;
      w *= kFeetToMeters;
    }
    if (!pp.frames.back().positions.emplace(id, CourtState{l, w}).second) {
      throw ConfigError(ctx + ": player " + std::to_string(id) + " appears twice in one frame");
    }
    if (!pp.labels.count(id)) {
      pp.order.push_back(id);
      pp.labels[id] = {cell(row, "team"), cell(row, "role")};
    }
  }

  PlayFile file;
  file.dt_ms = options.dt_ms;
  file.court = options.court;
  for (const auto & play_id : play_order) {
    auto & pp = pending[play_id];
    Play play;
    play.play_id = play_id;
    play.game_id = pp.game_id;
    play.dt = options.dt_ms / 1000.0;
    play.agent_id = options.agent_id.value_or(pp.order.front());
    static const Role kRoles[] = {Role::kC, Role::kPF, Role::kSF, Role::kSG, Role::kPG};
    for (std::size_t k = 0; k < pp.order.size(); ++k) {
      const NodeId id = pp.order[k];
      PlayerTrack track;
      track.id = id;
      const auto & [team, role] = pp.labels[id];
      track.team = team && !team->empty() ? parse_team(*team) : (k < 5 ? Team::kHome : Team::kAway);
      track.role = role && !role->empty() ? parse_role(*role) : kRoles[k % 5];
      for (std::size_t f = 0; f < pp.frames.size(); ++f) {
        const auto it = pp.frames[f].positions.find(id);
        if (it == pp.frames[f].positions.end()) {
          throw ConfigError(
            "csv play '" + play_id + "': player " + std::to_string(id) + " missing at game_clock " +
            pp.frames[f].clock);
        }
        track.positions.push_back(it->second);
      }
      play.players.push_back(std::move(track));
    }
    validate_play(play, file.court, options.clip_out_of_bounds, "csv play '" + play_id + "'");
    file.plays.push_back(std::move(play));
  }
  return file;
}

PlayFile import_sportvu_csv(const std::filesystem::path & path, const CsvImportOptions & options)
{
  return import_sportvu_csv_string(read_file(path), options);
}

}  // namespace trajgraph
