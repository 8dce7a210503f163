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

#include "trajgraph/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trajgraph
{

double CourtAction::speed() const { return std::hypot(dl, dw); }

bool CourtSpec::contains(const CourtState & x) const
{
  return x.l >= 0.0 && x.l <= length && x.w >= 0.0 && x.w <= width;
}

CourtState CourtSpec::clip(const CourtState & x) const
{
  return {std::clamp(x.l, 0.0, length), std::clamp(x.w, 0.0, width)};
}

double distance(const CourtState & a, const CourtState & b) { return std::hypot(a.l - b.l, a.w - b.w); }

CourtState propagate(const CourtState & x, const CourtAction & u, double dt)
{
  if (!(dt > 0.0)) throw DomainError("propagate: dt must be positive, got " + std::to_string(dt));
  return {x.l + u.dl * dt, x.w + u.dw * dt};
}

CourtAction clamp_speed(const CourtAction & u)
{
  const double s = u.speed();
  if (s <= kMaxHumanSpeed) return u;
  const double f = kMaxHumanSpeed / s;
  CourtAction out{u.dl * f, u.dw * f};
  // Rounding can leave the rescaled speed an ulp above the cap.
  while (out.speed() > kMaxHumanSpeed) {
    out.dl = std::nextafter(out.dl, 0.0);
    out.dw = std::nextafter(out.dw, 0.0);
  }
  return out;
}

std::vector<CourtAction> actions_from_positions(std::span<const CourtState> positions, double dt)
{
  if (positions.size() < 2) {
    throw DomainError("actions_from_positions: need at least 2 positions, got " + std::to_string(positions.size()));
  }
  if (!(dt > 0.0)) throw DomainError("actions_from_positions: dt must be positive");
  std::vector<CourtAction> out;
  out.reserve(positions.size() - 1);
  for (std::size_t t = 0; t + 1 < positions.size(); ++t) {
    const CourtAction raw{
      (positions[t + 1].l - positions[t].l) / dt, (positions[t + 1].w - positions[t].w) / dt};
    out.push_back(clamp_speed(raw));
  }
  return out;
}

double Trajectory::max_inconsistency() const
{
  double worst = 0.0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    worst = std::max(worst, distance(states[t + 1], propagate(states[t], actions[t], dt)));
  }
  return worst;
}

std::vector<CourtState> rollout(const CourtState & start, std::span<const CourtAction> actions, double dt)
{
  std::vector<CourtState> states{start};
  states.reserve(actions.size() + 1);
  for (const auto & u : actions) states.push_back(propagate(states.back(), u, dt));
  return states;
}

Trajectory make_trajectory(std::span<const CourtState> positions, double dt)
{
  Trajectory traj;
  traj.dt = dt;
  traj.actions = actions_from_positions(positions, dt);
  const bool clamped = [&] {
    for (std::size_t t = 0; t < traj.actions.size(); ++t) {
      const double dl = (positions[t + 1].l - positions[t].l) / dt;
      const double dw = (positions[t + 1].w - positions[t].w) / dt;
      if (traj.actions[t].dl != dl || traj.actions[t].dw != dw) return true;
    }
    return false;
  }();
  if (clamped) {
    traj.states = rollout(positions.front(), traj.actions, dt);
  } else {
    traj.states.assign(positions.begin(), positions.end());
  }
  return traj;
}

}  // namespace trajgraph
