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

#include <algorithm>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"
#include "lincce/lincce.hpp"
#include "test_util.hpp"

namespace lincce {
namespace {

StepMixturePolicy uniform_mix(const MarkovGame& game) {
  return StepMixturePolicy::from_product(uniform_policy(game));
}

TEST(EvaluateValuesTest, ConstantRewardGivesHorizonTimesReward) {
  const MarkovGame game = testing::constant_reward_game(3, {2, 3}, 3, 0.5, 1);
  const auto mix = testing::random_mixture(game, 3, 2);
  const ValueTable v = evaluate_values(game, mix);
  for (int i = 0; i < 2; ++i)
    for (int s = 0; s < 3; ++s) EXPECT_NEAR(v.at(0, i, s), 1.5, 1e-12);
}

TEST(EvaluateValuesTest, MatchingPenniesUniform) {
  const MarkovGame game = matching_pennies();
  const ValueTable v = evaluate_values(game, uniform_mix(game));
  EXPECT_DOUBLE_EQ(v.at(0, 0, 0), 0.5);
  EXPECT_DOUBLE_EQ(v.at(0, 1, 0), 0.5);
}

TEST(EvaluateValuesTest, SingleActionUnitRewardGivesHorizon) {
  const MarkovGame game = testing::single_action_game(3, 2, 4);
  const ValueTable v = evaluate_values(game, uniform_mix(game));
  EXPECT_DOUBLE_EQ(v.at(0, 0, 0), 4.0);
  EXPECT_DOUBLE_EQ(v.at(0, 1, 0), 4.0);
}

TEST(BestResponseTest, PrisonersDilemmaDefects) {
  const MarkovGame game = prisoners_dilemma();
  const BestResponse br = best_response(game, uniform_mix(game), 0);
  EXPECT_EQ(br.action[0][0], 1);
  EXPECT_NEAR(br.value[0][0], 0.6, 1e-15);
}

TEST(BestResponseTest, MatchingPenniesTieGoesToActionZero) {
  const MarkovGame game = matching_pennies();
  const BestResponse br = best_response(game, uniform_mix(game), 1);
  EXPECT_EQ(br.action[0][0], 0);
  EXPECT_DOUBLE_EQ(br.value[0][0], 0.5);
}

TEST(BestResponseTest, IndifferentGameMatchesPolicyValue) {
  const MarkovGame game = testing::constant_reward_game(3, {2, 2}, 3, 0.3, 5);
  const auto mix = testing::random_mixture(game, 2, 6);
  const ValueTable v = evaluate_values(game, mix);
  for (int i = 0; i < 2; ++i) {
    const BestResponse br = best_response(game, mix, i);
    for (int h = 0; h < 3; ++h)
      for (int s = 0; s < 3; ++s) EXPECT_NEAR(br.value[h][s], v.at(h, i, s), 1e-12);
  }
}

TEST(CceGapTest, MatchingPenniesUniformHasZeroGap) {
  const MarkovGame game = matching_pennies();
  const GapReport r = cce_gap(game, uniform_mix(game));
  EXPECT_DOUBLE_EQ(r.gap[0], 0.0);
  EXPECT_DOUBLE_EQ(r.gap[1], 0.0);
  EXPECT_DOUBLE_EQ(r.max_gap, 0.0);
}

TEST(CceGapTest, PrisonersDilemmaUniform) {
  const MarkovGame game = prisoners_dilemma();
  const GapReport r = cce_gap(game, uniform_mix(game));
  EXPECT_NEAR(r.policy_value[0], 0.45, 1e-15);
  EXPECT_NEAR(r.gap[0], 0.15, 1e-15);
  EXPECT_NEAR(r.gap[1], 0.15, 1e-15);
  EXPECT_NEAR(r.max_gap, 0.15, 1e-15);
}

TEST(CceGapTest, PrisonersDilemmaEquilibriumHasZeroGap) {
  const MarkovGame game = prisoners_dilemma();
  EXPECT_EQ(cce_gap(game, testing::pure_policy(game, {1, 1})).max_gap, 0.0);
}

TEST(CceGapTest, CorrelatedMatchingPenniesMixture) {
  // Half (0,0), half (1,1): agent 0 always wins and loses 0.5 by deviating,
  // since a deviator cannot see the shared draw; agent 1 gains 0.5.
  const MarkovGame game = matching_pennies();
  StepMixturePolicy::Step step{{0.5, 0.5}, {1, 0, 1, 0, 0, 1, 0, 1}};
  const GapReport r = cce_gap(game, StepMixturePolicy(1, {2, 2}, {step}));
  EXPECT_DOUBLE_EQ(r.gap[0], -0.5);
  EXPECT_DOUBLE_EQ(r.gap[1], 0.5);
  EXPECT_DOUBLE_EQ(r.max_gap, 0.5);
}

// Forward enumeration over all histories is an implementation independent
// of the backward recursion.
TEST(OraclePropertyTest, EvaluateMatchesForwardEnumeration) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int S = 1 + seed % 3;
    const MarkovGame game = generate_random_tabular(
        S, {1 + static_cast<int>(seed % 3), 2}, 1 + seed % 3, seed);
    const auto mix = testing::random_mixture(game, 1 + seed % 3, seed + 7);
    const ValueTable v = evaluate_values(game, mix);
    const auto expected = testing::enumerate_returns(game, mix);
    for (int i = 0; i < 2; ++i)
      EXPECT_NEAR(v.at(0, i, game.initial_state()), expected[i], 1e-12);
  }
}

TEST(OraclePropertyTest, BestResponseMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const MarkovGame game = generate_random_tabular(2, {2, 2}, 2, seed);
    const auto mix = testing::random_mixture(game, 1 + seed % 3, seed + 11);
    for (int i = 0; i < 2; ++i)
      EXPECT_NEAR(best_response(game, mix, i).value[0][0],
                  testing::brute_force_best_response(game, mix, i), 1e-12);
  }
}

// Dominance holds for product policies; a correlated mixture can pay an
// agent more than any unilateral deviation does.
TEST(OraclePropertyTest, BestResponseDominatesProductPolicyValue) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const MarkovGame game = generate_random_tabular(3, {3, 2, 2}, 3, seed);
    const auto mix = testing::random_mixture(game, 1, seed);
    const ValueTable v = evaluate_values(game, mix);
    for (int i = 0; i < 3; ++i) {
      const BestResponse br = best_response(game, mix, i);
      for (int h = 0; h < 3; ++h)
        for (int s = 0; s < 3; ++s) EXPECT_GE(br.value[h][s], v.at(h, i, s) - 1e-9);
    }
  }
}

// Relabeling a strictly dominated action leaves the best-response value
// unchanged.
TEST(OraclePropertyTest, RelabelingDominatedActionsKeepsValue) {
  // Agent 0 has three actions; action 2 earns nothing and is strictly
  // dominated. Swap labels 1 and 2 and compare.
  std::vector<double> payoff0 = {0.8, 0.2, 0.3, 0.9, 0.0, 0.0};
  std::vector<double> payoff1 = {0.1, 0.5, 0.4, 0.6, 0.2, 0.7};
  const MarkovGame game = matrix_game({payoff0, payoff1}, {3, 2});
  const MarkovGame swapped = matrix_game(
      {{0.8, 0.2, 0.0, 0.0, 0.3, 0.9}, {0.1, 0.5, 0.2, 0.7, 0.4, 0.6}}, {3, 2});
  const auto mix = testing::random_mixture(game, 2, 3);
  const auto v = best_response(game, mix, 0).value[0][0];
  const auto v_swapped = best_response(swapped, mix, 0).value[0][0];
  EXPECT_NEAR(v, v_swapped, 1e-15);
}

TEST(OraclePropertyTest, GapReportMaxIsMaxOfAgents) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MarkovGame game = generate_random_tabular(2, {2, 3}, 2, seed);
    const GapReport r = cce_gap(game, testing::random_mixture(game, 2, seed));
    EXPECT_EQ(r.max_gap, *std::max_element(r.gap.begin(), r.gap.end()));
  }
}

TEST(MonteCarloTest, DeterministicGameIsExact) {
  const MarkovGame game = testing::single_action_game(3, 2, 3);
  const auto est = monte_carlo_value(game, uniform_mix(game), 100, 1);
  EXPECT_EQ(est.mean[0], 3.0);
  EXPECT_EQ(est.std_error[0], 0.0);
}

TEST(MonteCarloTest, ConstantRewardIsExact) {
  const MarkovGame game = testing::constant_reward_game(3, {2, 2}, 2, 0.25, 3);
  const auto est = monte_carlo_value(game, testing::random_mixture(game, 2, 1), 50, 2);
  EXPECT_DOUBLE_EQ(est.mean[1], 0.5);
}

TEST(MonteCarloTest, MatchingPenniesWithinBinomialError) {
  const MarkovGame game = matching_pennies();
  const auto est = monte_carlo_value(game, uniform_mix(game), 100000, 17);
  EXPECT_NEAR(est.mean[0], 0.5, 3 * 0.0016);
  EXPECT_NEAR(est.std_error[0], 0.0016, 1e-4);
}

TEST(MonteCarloTest, AgreesWithEvaluationWithinFourStandardErrors) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const MarkovGame game = generate_random_tabular(3, {2, 3}, 3, seed);
    const auto mix = testing::random_mixture(game, 3, seed);
    const ValueTable v = evaluate_values(game, mix);
    const auto est = monte_carlo_value(game, mix, 20000, seed);
    for (int i = 0; i < 2; ++i)
      EXPECT_LE(std::abs(est.mean[i] - v.at(0, i, 0)), 4 * est.std_error[i]);
  }
}

TEST(OracleErrorsTest, MismatchedPolicyIsRejected) {
  const MarkovGame game = matching_pennies();
  const auto other = uniform_mix(generate_random_tabular(2, {2, 2}, 1, 0));
  EXPECT_THROW(evaluate_values(game, other), DimensionError);
  EXPECT_THROW(best_response(game, uniform_mix(game), 2), DimensionError);
}

}  // namespace
}  // namespace lincce
