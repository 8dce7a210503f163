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

#include "trajgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace trajgraph
{

std::vector<CourtState> resolve_attractors(const SynthConfig & c)
{
  if (!c.attractors.empty()) return c.attractors;
  std::vector<CourtState> out;
  const double cl = c.court.length / 2.0;
  const double cw = c.court.width / 2.0;
  const double rl = c.court.length * 0.35;
  const double rw = c.court.width * 0.35;
  for (std::size_t m = 0; m < c.modes; ++m) {
    const double a = 2.0 * std::numbers::pi * (static_cast<double>(m) + 0.5) / static_cast<double>(c.modes);
    out.push_back({cl + rl * std::cos(a), cw + rw * std::sin(a)});
  }
  return out;
}

void validate(const SynthConfig & c)
{
  auto fail = [](const std::string & m) { throw ConfigError("synth config: " + m); };
  if (c.switch_prob < 0.0 || c.switch_prob > 1.0) fail("switch_prob must lie in [0, 1]");
  if (c.noise < 0.0) fail("noise must be non-negative");
  if (!(c.dt > 0.0)) fail("dt must be positive");
  if (c.frames < 2) fail("frames must be at least 2");
  if (c.min_players < 1 || c.max_players < c.min_players) fail("need 1 <= min_players <= max_players");
  if (c.attractors.empty() && c.modes < 1) fail("need at least one attractor");
  if (c.speed < 0.0 || c.arrive_radius < 0.0 || c.repulsion_radius < 0.0 || c.herd_radius < 0.0) {
    fail("radii and speed must be non-negative");
  }
  for (const auto & a : resolve_attractors(c)) {
    if (!c.court.contains(a)) fail("attractor outside the court");
  }
}

namespace
{
std::size_t pick_other(std::size_t current, std::size_t count, std::mt19937_64 & rng)
{
  if (count <= 1) return current;
  std::uniform_int_distribution<std::size_t> d(0, count - 2);
  const std::size_t k = d(rng);
  return k >= current ? k + 1 : k;
}
}  // namespace

PlayFile synth_generate(const SynthConfig & c)
{
  validate(c);
  const auto goals = resolve_attractors(c);
  std::vector<NodeType> types = c.types;
  if (types.empty()) types = all_human_types();

  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PlayFile file;
  file.dt_ms = c.dt * 1000.0;
  file.court = c.court;
  for (std::size_t p = 0; p < c.plays; ++p) {
    std::uniform_int_distribution<std::size_t> count_dist(c.min_players, c.max_players);
    const std::size_t n = count_dist(rng);
    std::vector<CourtState> x(n);
    std::vector<CourtAction> u(n);
    std::vector<std::size_t> goal(n);
    const double margin = 1.0;
    std::uniform_real_distribution<double> ul(margin, c.court.length - margin);
    std::uniform_real_distribution<double> uw(margin, c.court.width - margin);
    std::uniform_int_distribution<std::size_t> goal_dist(0, goals.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = {ul(rng), uw(rng)};
      goal[i] = goal_dist(rng);
    }

    Play play;
    play.play_id = "synth-" + std::to_string(p);
    play.game_id = "synth";
    play.dt = c.dt;
    play.agent_id = 0;
    play.players.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto & tr = play.players[i];
      tr.id = static_cast<NodeId>(i);
      tr.team = types[i % types.size()].team;
      tr.role = types[i % types.size()].role;
      tr.positions.push_back(x[i]);
      tr.modes.push_back(static_cast<int>(goal[i]));
    }

    for (std::size_t f = 1; f < c.frames; ++f) {
      std::vector<CourtAction> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        const CourtState & g = goals[goal[i]];
        const double dl = g.l - x[i].l;
        const double dw = g.w - x[i].w;
        const double d = std::hypot(dl, dw);
        double vl = 0.0;
        double vw = 0.0;
        if (d > 1e-12) {
          const double v = std::min(c.speed, d / c.dt);
          vl = v * dl / d;
          vw = v * dw / d;
        }
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const double r = distance(x[i], x[j]);
          if (r < c.repulsion_radius && r > 1e-12) {
            const double push = c.repulsion_gain * c.speed * (1.0 - r / c.repulsion_radius);
            vl += push * (x[i].l - x[j].l) / r;
            vw += push * (x[i].w - x[j].w) / r;
          }
          if (c.herd_gain != 0.0 && r <= c.herd_radius) {
            vl += c.herd_gain * u[j].dl;
            vw += c.herd_gain * u[j].dw;
          }
        }
        vl += c.noise * noise(rng);
        vw += c.noise * noise(rng);
        next[i] = clamp_speed({vl, vw});
      }
      for (std::size_t i = 0; i < n; ++i) {
        const CourtState moved = c.court.clip(propagate(x[i], next[i], c.dt));
        u[i] = {(moved.l - x[i].l) / c.dt, (moved.w - x[i].w) / c.dt};
        x[i] = moved;
        if (distance(x[i], goals[goal[i]]) < c.arrive_radius || unit(rng) < c.switch_prob) {
          goal[i] = pick_other(goal[i], goals.size(), rng);
        }
        play.players[i].positions.push_back(x[i]);
        play.players[i].modes.push_back(static_cast<int>(goal[i]));
      }
    }
    file.plays.push_back(std::move(play));
  }
  return file;
}

}  // namespace trajgraph
