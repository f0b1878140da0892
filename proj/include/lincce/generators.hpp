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

#ifndef LINCCE_GENERATORS_HPP
#define LINCCE_GENERATORS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "lincce/errors.hpp"
#include "lincce/game.hpp"
#include "lincce/random.hpp"

namespace lincce {

/// Random game: every transition row is an independent Dirichlet(1) draw
/// (strictly positive), rewards are uniform in [0, 1]. s_1 = 0.
inline MarkovGame generate_random_tabular(int num_states,
                                          std::vector<int> action_counts,
                                          int horizon, std::uint64_t seed) {
  if (num_states < 1 || horizon < 1 || action_counts.empty())
    throw DimensionError("random_tabular needs positive sizes");
  for (int a : action_counts)
    if (a < 1) throw DimensionError("random_tabular needs positive sizes");
  const JointActionSpace space(action_counts);
  const int m = space.num_agents();
  const int J = space.size();
  Rng rng(seed);
  std::vector<double> P;
  P.reserve(static_cast<std::size_t>(horizon) * num_states * J * num_states);
  std::vector<double> row(num_states);
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states; ++s)
      for (int ja = 0; ja < J; ++ja) {
        double total = 0.0;
        for (double& x : row) {
          x = 1e-6 - std::log1p(-rng.uniform());
          total += x;
        }
        for (double x : row) P.push_back(x / total);
      }
  std::vector<double> r(static_cast<std::size_t>(horizon) * m * num_states * J);
  for (double& x : r) x = rng.uniform();
  return MarkovGame(num_states, std::move(action_counts), horizon, 0,
                    std::move(P), std::move(r));
}

/// Single-state game repeating the same normal-form payoffs at every step.
/// `payoffs[i]` lists agent i's reward per flattened joint action.
inline MarkovGame matrix_game(const std::vector<std::vector<double>>& payoffs,
                              std::vector<int> action_counts, int horizon = 1) {
  const JointActionSpace space(action_counts);
  if (static_cast<int>(payoffs.size()) != space.num_agents())
    throw DimensionError("one payoff vector per agent is required");
  for (const auto& p : payoffs)
    if (static_cast<int>(p.size()) != space.size())
      throw DimensionError("payoff vector must cover every joint action");
  const int J = space.size();
  std::vector<double> P(static_cast<std::size_t>(horizon) * J, 1.0);
  std::vector<double> r;
  for (int h = 0; h < horizon; ++h)
    for (const auto& p : payoffs) r.insert(r.end(), p.begin(), p.end());
  return MarkovGame(1, std::move(action_counts), horizon, 0, std::move(P),
                    std::move(r));
}

/// Deterministic chain s -> min(s + 1, S - 1) starting at 0. Agent i earns 1
/// for action 0 and 0.5 otherwise; with one action per agent every reward is 1.
inline MarkovGame chain_game(int num_states, int horizon, int num_agents = 1,
                             int num_actions = 1) {
  if (num_states < 1 || horizon < 1 || num_agents < 1 || num_actions < 1)
    throw DimensionError("chain needs positive sizes");
  std::vector<int> counts(num_agents, num_actions);
  const JointActionSpace space(counts);
  const int J = space.size();
  std::vector<double> P;
  std::vector<double> r;
  for (int h = 0; h < horizon; ++h)
    for (int s = 0; s < num_states; ++s)
      for (int ja = 0; ja < J; ++ja)
        for (int sn = 0; sn < num_states; ++sn)
          P.push_back(sn == std::min(s + 1, num_states - 1) ? 1.0 : 0.0);
  for (int h = 0; h < horizon; ++h)
    for (int i = 0; i < num_agents; ++i)
      for (int s = 0; s < num_states; ++s)
        for (int ja = 0; ja < J; ++ja)
          r.push_back(space.action_of(ja, i) == 0 ? 1.0 : 0.5);
  return MarkovGame(num_states, std::move(counts), horizon, 0, std::move(P),
                    std::move(r));
}

/// Agent 0 earns 1 when the actions match, agent 1 earns 1 otherwise.
inline MarkovGame matching_pennies(int horizon = 1) {
  return matrix_game({{1, 0, 0, 1}, {0, 1, 1, 0}}, {2, 2}, horizon);
}

/// Action 0 cooperates, 1 defects; payoffs scaled into [0, 1].
inline MarkovGame prisoners_dilemma(int horizon = 1) {
  return matrix_game({{0.6, 0.0, 1.0, 0.2}, {0.6, 1.0, 0.0, 0.2}}, {2, 2},
                     horizon);
}

}  // namespace lincce

#endif  // LINCCE_GENERATORS_HPP
