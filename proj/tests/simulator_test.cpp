// Copyright 2026 The lincce Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "lincce/lincce.hpp"
#include "test_util.hpp"

namespace lincce {
namespace {

TEST(SimulatorTest, PointMassTransitionIsDeterministic) {
  const MarkovGame game = chain_game(4, 3, 2, 2);
  Simulator sim(game, AccessProtocol::kRandomAccess, 5);
  for (int n = 0; n < 50; ++n) {
    EXPECT_EQ(sim.query(1, 2, n % 4).next_state, 3);
    EXPECT_EQ(sim.query(0, 3, 0).next_state, 3);
  }
}

TEST(SimulatorTest, LocalAccessRefusesUnvisitedState) {
  const MarkovGame game = generate_random_tabular(3, {2}, 2, 1);
  Simulator sim(game, AccessProtocol::kLocalAccess, 0);
  EXPECT_TRUE(sim.allowed(0, 0));
  int unvisited = -1;
  for (int s = 0; s < 3; ++s)
    if (!sim.visited(s)) unvisited = s;
  ASSERT_GE(unvisited, 0);
  try {
    sim.query(1, unvisited, 0);
    FAIL() << "expected a protocol violation";
  } catch (const ProtocolViolation& e) {
    EXPECT_EQ(e.step(), 1);
    EXPECT_EQ(e.state(), unvisited);
  }
  EXPECT_EQ(sim.ledger().violation_count, 1);
  EXPECT_EQ(sim.ledger().total_queries, 0);
}

TEST(SimulatorTest, ReturnedStateIsLegalAtEveryStep) {
  const MarkovGame game = generate_random_tabular(6, {2, 2}, 4, 3);
  Simulator sim(game, AccessProtocol::kLocalAccess, 11);
  Rng rng(2);
  std::vector<int> frontier = {0};
  for (int n = 0; n < 200; ++n) {
    const int s = frontier[static_cast<int>(rng.uniform() * frontier.size())];
    const int next = sim.query(static_cast<int>(rng.uniform() * 4), s, n % 4).next_state;
    for (int h = 0; h < 4; ++h) EXPECT_TRUE(sim.allowed(h, next));
    frontier.push_back(next);
  }
  EXPECT_EQ(sim.ledger().violation_count, 0);
}

// Empirical next-state distribution against the stored tensor.
TEST(SimulatorTest, EmpiricalTransitionsWithinTotalVariation) {
  const MarkovGame game = generate_random_tabular(5, {2, 3}, 2, 9);
  Simulator sim(game, AccessProtocol::kRandomAccess, 123);
  const int n = 10000;
  for (int ja : {0, 4}) {
    std::vector<double> counts(5, 0.0);
    for (int q = 0; q < n; ++q) counts[sim.query(1, 3, ja).next_state] += 1.0;
    const auto row = game.transition(1, 3, ja);
    double tv = 0.0;
    for (int s = 0; s < 5; ++s) tv += std::abs(counts[s] / n - row[s]);
    EXPECT_LE(0.5 * tv, 0.03);
  }
}

TEST(SimulatorTest, SameSeedSameQueriesSameOutputs) {
  const MarkovGame game = generate_random_tabular(5, {3}, 3, 2);
  Simulator a(game, AccessProtocol::kRandomAccess, 77);
  Simulator b(game, AccessProtocol::kRandomAccess, 77);
  Simulator c(game, AccessProtocol::kRandomAccess, 78);
  int differ = 0;
  for (int q = 0; q < 500; ++q) {
    const int h = q % 3, s = (q * 7) % 5, ja = q % 3;
    const int na = a.query(h, s, ja).next_state;
    EXPECT_EQ(na, b.query(h, s, ja).next_state);
    differ += na != c.query(h, s, ja).next_state;
  }
  EXPECT_GT(differ, 0);
}

TEST(SimulatorTest, RefusedQueryDoesNotShiftLaterDraws) {
  const MarkovGame game = generate_random_tabular(4, {2}, 2, 5);
  Simulator a(game, AccessProtocol::kOnlineAccess, 3);
  Simulator b(game, AccessProtocol::kOnlineAccess, 3);
  EXPECT_THROW(b.query(0, (b.cursor() + 1) % 4, 0), ProtocolViolation);
  for (int q = 0; q < 20; ++q)
    EXPECT_EQ(a.query(0, a.cursor(), 1).next_state,
              b.query(0, b.cursor(), 1).next_state);
}

TEST(SimulatorTest, ResetCursor) {
  const MarkovGame game = generate_random_tabular(4, {2}, 3, 5);
  Simulator sim(game, AccessProtocol::kOnlineAccess, 3);
  for (int h = 0; h < 3; ++h) sim.query(h, sim.cursor(), 1);
  EXPECT_EQ(sim.reset_cursor(), game.initial_state());
  EXPECT_EQ(sim.reset_cursor(), game.initial_state());
  EXPECT_EQ(sim.cursor(), game.initial_state());
  Simulator random(game, AccessProtocol::kRandomAccess, 3);
  EXPECT_THROW(random.reset_cursor(), ProtocolViolation);
}

TEST(SimulatorTest, LedgerCountsPhasesAndWritesCsv) {
  const MarkovGame game = chain_game(3, 2, 1, 2);
  Simulator sim(game, AccessProtocol::kLocalAccess, 1, true);
  sim.set_phase(Phase::kInit);
  sim.query(0, 0, 0);
  sim.set_phase(Phase::kLearn);
  sim.query(1, 1, 1);
  sim.query(1, 0, 1);
  EXPECT_EQ(sim.ledger().total_queries, 3);
  EXPECT_EQ(sim.ledger().phase_count(Phase::kInit), 1);
  EXPECT_EQ(sim.ledger().phase_count(Phase::kLearn), 2);
  EXPECT_EQ(sim.ledger().num_visited(), 3);
  std::ostringstream out;
  write_ledger_csv(sim.ledger(), out);
  EXPECT_EQ(out.str(),
            "query_index,phase,h,s,joint_a,s_next,protocol_ok\n"
            "0,init,0,0,0,1,1\n"
            "1,learn,1,1,1,2,1\n"
            "2,learn,1,0,1,1,1\n");
}

TEST(LocalSamplingTest, DeterministicOpponentAndTransition) {
  const MarkovGame game = chain_game(3, 2, 2, 2);
  Simulator sim(game, AccessProtocol::kLocalAccess, 0);
  const ProductOpponents opponents{{{0.0, 0.0}, {0.0, 1.0}}};
  Rng rng(1);
  for (int n = 0; n < 10; ++n) {
    const auto sample = local_sampling(sim, 0, 0, 0, 1, opponents, rng);
    EXPECT_EQ(sample.reward, 0.5);
    EXPECT_EQ(sample.next_state, 1);
  }
}

TEST(LocalSamplingTest, RewardIndependentOfOpponents) {
  // Agent 0's reward depends only on its own action.
  const MarkovGame game = matrix_game({{0.2, 0.2, 0.2, 0.9, 0.9, 0.9},
                                       {0.1, 0.5, 0.3, 0.0, 1.0, 0.4}},
                                      {2, 3});
  Simulator sim(game, AccessProtocol::kLocalAccess, 0);
  const ProductOpponents opponents{{{}, {1.0 / 3, 1.0 / 3, 1.0 / 3}}};
  Rng rng(4);
  for (int n = 0; n < 30; ++n)
    EXPECT_EQ(local_sampling(sim, 0, 0, 0, 1, opponents, rng).reward, 0.9);
}

TEST(LocalSamplingTest, ExpectedRewardMatchesTensorWithinThreeSe) {
  const MarkovGame game = generate_random_tabular(2, {2, 3, 2}, 1, 21);
  Simulator sim(game, AccessProtocol::kLocalAccess, 8);
  const std::vector<std::vector<double>> dists = {{}, {0.2, 0.5, 0.3}, {0.7, 0.3}};
  const ProductOpponents opponents{dists};
  double exact = 0.0;
  for (int a1 = 0; a1 < 3; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      exact += dists[1][a1] * dists[2][a2] *
               game.reward(0, 0, 0, game.joint_space().encode(std::vector<int>{1, a1, a2}));
  Rng rng(5);
  const int n = 10000;
  double sum = 0.0, sum_sq = 0.0;
  for (int q = 0; q < n; ++q) {
    const double r = local_sampling(sim, 0, 0, 0, 1, opponents, rng).reward;
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - exact), 3 * se);
}

TEST(SampleIndexTest, SkipsZeroMass) {
  const std::vector<double> p = {0.0, 0.5, 0.0, 0.5};
  EXPECT_EQ(sample_index(p, 0.0), 1);
  EXPECT_EQ(sample_index(p, 0.49), 1);
  EXPECT_EQ(sample_index(p, 0.5), 3);
  EXPECT_EQ(sample_index(std::vector<double>{0.3, 0.0}, 0.999999), 0);
}

}  // namespace
}  // namespace lincce
