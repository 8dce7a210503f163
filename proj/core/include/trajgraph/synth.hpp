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

#ifndef TRAJGRAPH__SYNTH_HPP_
#define TRAJGRAPH__SYNTH_HPP_

#include <cstdint>
#include <vector>

#include "trajgraph/play.hpp"

namespace trajgraph
{

/// Seeded generator of goal-switching multi-agent plays.
///
/// Every player heads for one of the attractor goals at `speed`, with
/// Gaussian action noise. On arrival (within `arrive_radius`) it picks a new
/// goal uniformly among the others; otherwise it switches with probability
/// `switch_prob` per step. Players closer than `repulsion_radius` push each
/// other apart, and `herd_gain` adds that multiple of the summed previous
/// actions of players within `herd_radius`, so behaviour depends on how many
/// neighbours there are. The goal index is recorded as the per-frame mode.
struct SynthConfig
{
  std::uint64_t seed{1};
  std::size_t plays{20};
  std::size_t frames{150};
  double dt{0.04};
  std::size_t min_players{4};
  std::size_t max_players{4};
  /// Goal count; used to lay out default attractors when `attractors` is empty.
  std::size_t modes{4};
  std::vector<CourtState> attractors;
  double switch_prob{0.01};
  double noise{0.3};
  double speed{4.0};
  double arrive_radius{0.75};
  double repulsion_radius{1.0};
  double repulsion_gain{1.0};
  double herd_radius{2.0};
  double herd_gain{0.0};
  /// Cycled over players in id order; the first player is the agent.
  std::vector<NodeType> types;
  CourtSpec court;
};

/// Attractors actually used for `config` (explicit list or the default ring).
std::vector<CourtState> resolve_attractors(const SynthConfig & config);

/// Throws ConfigError on out-of-range fields.
void validate(const SynthConfig & config);

PlayFile synth_generate(const SynthConfig & config);

}  // namespace trajgraph

#endif  // TRAJGRAPH__SYNTH_HPP_
