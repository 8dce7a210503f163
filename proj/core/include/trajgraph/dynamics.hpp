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

#ifndef TRAJGRAPH__DYNAMICS_HPP_
#define TRAJGRAPH__DYNAMICS_HPP_

#include <span>
#include <vector>

#include "trajgraph/errors.hpp"

namespace trajgraph
{

/// Fastest recorded human footspeed; every action is clamped to it.
inline constexpr double kMaxHumanSpeed = 12.42;

/// Center-of-mass position on the court, meters. `l` runs along the court
/// length from the left basket, `w` across it from the bottom sideline.
struct CourtState
{
  double l{0.0};
  double w{0.0};

  friend bool operator==(const CourtState &, const CourtState &) = default;
};

/// Single-integrator control, m/s.
struct CourtAction
{
  double dl{0.0};
  double dw{0.0};

  double speed() const;
  friend bool operator==(const CourtAction &, const CourtAction &) = default;
};

struct CourtSpec
{
  double length{28.65};
  double width{15.24};

  bool contains(const CourtState & x) const;
  CourtState clip(const CourtState & x) const;
};

double distance(const CourtState & a, const CourtState & b);

/// Explicit-Euler single integrator: x + u * dt.
CourtState propagate(const CourtState & x, const CourtAction & u, double dt);

/// Direction-preserving rescale onto the speed cap; identity below it.
CourtAction clamp_speed(const CourtAction & u);

/// Forward differences (x[t+1] - x[t]) / dt, each clamped.
std::vector<CourtAction> actions_from_positions(std::span<const CourtState> positions, double dt);

/// States and the actions that connect them; actions.size() == states.size() - 1.
struct Trajectory
{
  double dt{0.04};
  std::vector<CourtState> states;
  std::vector<CourtAction> actions;

  /// Largest gap between states[t+1] and propagate(states[t], actions[t]).
  double max_inconsistency() const;
};

/// Recovers clamped actions from positions and re-integrates the states from
/// the first position, so the result is exactly self-consistent even where
/// clamping fired.
Trajectory make_trajectory(std::span<const CourtState> positions, double dt);

/// Rolls `actions` forward from `start`.
std::vector<CourtState> rollout(const CourtState & start, std::span<const CourtAction> actions, double dt);

}  // namespace trajgraph

#endif  // TRAJGRAPH__DYNAMICS_HPP_
