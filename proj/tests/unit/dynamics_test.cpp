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

#include <cmath>
#include <random>

#include "trajgraph/dynamics.hpp"

namespace trajgraph
{
namespace
{

TEST(Dynamics, PropagateIsExplicitEuler)
{
  const CourtState x = propagate({1.0, 2.0}, {3.0, -1.0}, 0.04);
  EXPECT_DOUBLE_EQ(x.l, 1.12);
  EXPECT_DOUBLE_EQ(x.w, 1.96);
  EXPECT_THROW(propagate({0, 0}, {1, 1}, 0.0), DomainError);
  EXPECT_THROW(propagate({0, 0}, {1, 1}, -0.04), DomainError);
}

TEST(Dynamics, ClampSpeedPreservesDirection)
{
  const CourtAction slow{3.0, 4.0};
  EXPECT_EQ(clamp_speed(slow), slow);
  const CourtAction fast = clamp_speed({30.0, 40.0});
  EXPECT_NEAR(fast.speed(), kMaxHumanSpeed, 1e-12);
  EXPECT_NEAR(fast.dl / fast.dw, 0.75, 1e-12);
  EXPECT_LE(fast.speed(), kMaxHumanSpeed);
}

TEST(Dynamics, ClampNeverExceedsCap)
{
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> mag(12.0, 500.0);
  for (int i = 0; i < 100000; ++i) {
    const double a = angle(rng);
    const double m = mag(rng);
    const CourtAction c = clamp_speed({m * std::cos(a), m * std::sin(a)});
    ASSERT_LE(c.speed(), kMaxHumanSpeed);
    if (m > kMaxHumanSpeed) ASSERT_NEAR(c.speed(), kMaxHumanSpeed, 1e-12);
  }
}

TEST(Dynamics, ActionsFromPositionsNeedTwoFrames)
{
  const CourtState one[] = {{1, 1}};
  EXPECT_THROW(actions_from_positions(one, 0.04), DomainError);
}

TEST(Dynamics, RoundTripRecoversPositions)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> step(0.0, 0.1);
  std::vector<CourtState> pos{{10.0, 5.0}};
  for (int i = 0; i < 200; ++i) pos.push_back({pos.back().l + step(rng), pos.back().w + step(rng)});
  const Trajectory tr = make_trajectory(pos, 0.04);
  ASSERT_EQ(tr.actions.size(), pos.size() - 1);
  EXPECT_LE(tr.max_inconsistency(), 1e-9);
  const auto again = rollout(pos.front(), tr.actions, 0.04);
  for (std::size_t t = 0; t < pos.size(); ++t) {
    EXPECT_LE(distance(again[t], pos[t]), 1e-9) << t;
  }
  for (const auto & u : tr.actions) EXPECT_LE(u.speed(), kMaxHumanSpeed);
}

TEST(Dynamics, ClampedJumpIsReintegratedConsistently)
{
  const std::vector<CourtState> pos{{0, 0}, {5, 0}, {5.1, 0}};
  const Trajectory tr = make_trajectory(pos, 0.04);
  EXPECT_NEAR(tr.actions[0].speed(), kMaxHumanSpeed, 1e-12);
  EXPECT_LE(tr.max_inconsistency(), 1e-12);
  EXPECT_NEAR(tr.states[1].l, kMaxHumanSpeed * 0.04, 1e-12);
}

TEST(Dynamics, CourtContainsAndClip)
{
  const CourtSpec court;
  EXPECT_TRUE(court.contains({0.0, 0.0}));
  EXPECT_TRUE(court.contains({28.65, 15.24}));
  EXPECT_FALSE(court.contains({-0.1, 3.0}));
  const CourtState c = court.clip({30.0, -2.0});
  EXPECT_DOUBLE_EQ(c.l, 28.65);
  EXPECT_DOUBLE_EQ(c.w, 0.0);
}

}  // namespace
}  // namespace trajgraph
