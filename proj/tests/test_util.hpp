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

#ifndef LINCCE_TESTS_TEST_UTIL_HPP
#define LINCCE_TESTS_TEST_UTIL_HPP

// Shared fixtures and brute-force reference implementations for the tests.
// The references enumerate trajectories forward and never call into the
// library's dynamic-programming code.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "lincce/lincce.hpp"

namespace lincce::testing {

/// Game with every reward equal to `value`.
inline MarkovGame constant_reward_game(int S, std::vector<int> A, int H,
                                       double value, std::uint64_t seed) {
  const MarkovGame base = generate_random_tabular(S, A, H, seed);
  std::vector<double> r(base.reward_tensor().size(), value);
  return MarkovGame(S, std::move(A), H, 0, base.transition_tensor(), std::move(r));
}

/// Single-action, deterministic game with unit rewards for every agent.
inline MarkovGame single_action_game(int S, int m, int H) {
  return chain_game(S, H, m, 1);
}

/// Random per-step mixture with `K` components, some of them sparse.
inline StepMixturePolicy random_mixture(const MarkovGame& game, int K,
                                        std::uint64_t seed) {
  Rng rng(seed);
  const int S = game.num_states();
  std::vector<StepMixturePolicy::Step> steps(game.horizon());
  for (auto& step : steps) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      step.weights.push_back(0.1 + rng.uniform());
      total += step.weights.back();
    }
    for (double& w : step.weights) w /= total;
    for (int k = 0; k < K; ++k)
      for (int i = 0; i < game.num_agents(); ++i)
        for (int s = 0; s < S; ++s) {
          const int A = game.actions(i);
          std::vector<double> p(A);
          double sum = 0.0;
          for (auto& x : p) {
            x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
            sum += x;
          }
          if (sum == 0.0) p[0] = sum = 1.0;
          for (auto& x : p) step.probs.push_back(x / sum);
        }
  }
  return StepMixturePolicy(S, game.action_counts(), std::move(steps));
}

/// Deterministic product policy in which every agent plays `actions[i]`.
inline StepMixturePolicy pure_policy(const MarkovGame& game,
                                     const std::vector<int>& actions) {
  std::vector<std::vector<std::vector<double>>> tables(game.horizon());
  for (auto& step : tables)
    for (int i = 0; i < game.num_agents(); ++i) {
      std::vector<double> t(game.num_states() * game.actions(i), 0.0);
      for (int s = 0; s < game.num_states(); ++s)
        t[s * game.actions(i) + actions[i]] = 1.0;
      step.push_back(t);
    }
  return StepMixturePolicy::from_product(
      ProductPolicy(game.num_states(), game.action_counts(), tables));
}

/// Probability of the joint action at (h, s) when agent `deviator` (if
/// >= 0) plays `dev_action` deterministically and the rest follow the
/// mixture. Computed component by component.
inline double joint_probability(const MarkovGame& game,
                                const StepMixturePolicy& mix, int h, int s,
                                const std::vector<int>& actions, int deviator,
                                int dev_action) {
  double total = 0.0;
  for (int k = 0; k < mix.num_components(h); ++k) {
    double p = mix.weights(h)[k];
    for (int j = 0; j < game.num_agents(); ++j) {
      if (j == deviator)
        p *= actions[j] == dev_action ? 1.0 : 0.0;
      else
        p *= mix.probs(h, k, j, s)[actions[j]];
    }
    total += p;
  }
  return total;
}

/// Expected return of every agent from s_1 by forward enumeration of all
/// (state, joint action) histories. `deviation`, if set, maps (h, s) to the
/// action of agent `deviator`.
inline std::vector<double> enumerate_returns(
    const MarkovGame& game, const StepMixturePolicy& mix, int deviator = -1,
    const std::function<int(int, int)>& deviation = {}) {
  const int m = game.num_agents();
  std::vector<double> result(m, 0.0);
  std::function<void(int, int, double, std::vector<double>)> walk =
      [&](int h, int s, double prob, std::vector<double> acc) {
        if (h == game.horizon()) {
          for (int i = 0; i < m; ++i) result[i] += prob * acc[i];
          return;
        }
        std::vector<int> actions(m, 0);
        for (;;) {
          const int dev = deviator >= 0 ? deviation(h, s) : -1;
          const double p = joint_probability(game, mix, h, s, actions, deviator, dev);
          if (p > 0.0) {
            const int joint = game.joint_space().encode(actions);
            std::vector<double> next_acc = acc;
            for (int i = 0; i < m; ++i) next_acc[i] += game.reward(h, i, s, joint);
            const auto row = game.transition(h, s, joint);
            for (int t = 0; t < game.num_states(); ++t)
              if (row[t] > 0.0) walk(h + 1, t, prob * p * row[t], next_acc);
          }
          int j = m - 1;
          while (j >= 0 && ++actions[j] == game.actions(j)) actions[j--] = 0;
          if (j < 0) break;
        }
      };
  walk(0, game.initial_state(), 1.0, std::vector<double>(m, 0.0));
  return result;
}

/// Best deviation value of `agent` by trying every deterministic Markov
/// policy (A^(S H) of them; keep games tiny).
inline double brute_force_best_response(const MarkovGame& game,
                                        const StepMixturePolicy& mix, int agent) {
  const int S = game.num_states();
  const int H = game.horizon();
  const int A = game.actions(agent);
  std::vector<int> choice(S * H, 0);
  double best = -1e300;
  for (;;) {
    const auto values = enumerate_returns(
        game, mix, agent, [&](int h, int s) { return choice[h * S + s]; });
    best = std::max(best, values[agent]);
    int j = S * H - 1;
    while (j >= 0 && ++choice[j] == A) choice[j--] = 0;
    if (j < 0) break;
  }
  return best;
}

/// Unit-norm random vector in R^d.
inline Eigen::VectorXd random_unit(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(d);
  for (int j = 0; j < d; ++j) v(j) = normal(rng);
  return v / v.norm();
}

/// Random feature map with unit-norm columns.
inline FeatureMap random_features(int S, int A, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd table(d, S * A);
  for (int c = 0; c < S * A; ++c) table.col(c) = random_unit(d, rng);
  return FeatureMap(S, A, table);
}

}  // namespace lincce::testing

#endif  // LINCCE_TESTS_TEST_UTIL_HPP
