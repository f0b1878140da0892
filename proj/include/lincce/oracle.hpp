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

#ifndef LINCCE_ORACLE_HPP
#define LINCCE_ORACLE_HPP

// Exact backward-induction evaluation of mixture policies and best
// responses on tabular games, plus a Monte Carlo cross-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "lincce/errors.hpp"
#include "lincce/game.hpp"
#include "lincce/random.hpp"

namespace lincce {

/// V_{h,i}(s) for h in [0, H]; the layer h = H is identically zero.
class ValueTable {
 public:
  ValueTable(int horizon, int num_agents, int num_states)
      : horizon_(horizon),
        num_agents_(num_agents),
        num_states_(num_states),
        values_(static_cast<std::size_t>(horizon + 1) * num_agents * num_states,
                0.0) {}

  double& at(int h, int agent, int s) {
    return values_[(static_cast<std::size_t>(h) * num_agents_ + agent) *
                       num_states_ + s];
  }
  double at(int h, int agent, int s) const {
    return values_[(static_cast<std::size_t>(h) * num_agents_ + agent) *
                       num_states_ + s];
  }

  int horizon() const noexcept { return horizon_; }
  int num_agents() const noexcept { return num_agents_; }
  int num_states() const noexcept { return num_states_; }

 private:
  int horizon_;
  int num_agents_;
  int num_states_;
  std::vector<double> values_;
};

/// Deterministic best response of one agent and its value V^{dagger}.
struct BestResponse {
  int agent = 0;
  /// action[h][s]
  std::vector<std::vector<int>> action;
  /// value[h][s] for h in [0, H]
  std::vector<std::vector<double>> value;
};

struct GapReport {
  std::vector<double> policy_value;
  std::vector<double> best_response_value;
  std::vector<double> gap;
  double max_gap = 0.0;
};

namespace detail {

inline void check_compatible(const MarkovGame& game,
                             const StepMixturePolicy& mix) {
  if (mix.horizon() != game.horizon() ||
      mix.num_states() != game.num_states() ||
      mix.action_counts() != game.action_counts())
    throw DimensionError("policy dimensions do not match the game");
}

inline double expected_next(const MarkovGame& game, int h, int s, int joint,
                            const std::vector<double>& next_values) {
  const auto row = game.transition(h, s, joint);
  double total = 0.0;
  for (int sn = 0; sn < game.num_states(); ++sn)
    if (row[sn] != 0.0) total += row[sn] * next_values[sn];
  return total;
}

}  // namespace detail

inline ValueTable evaluate_values(const MarkovGame& game,
                                  const StepMixturePolicy& mix) {
  detail::check_compatible(game, mix);
  const int S = game.num_states();
  const int m = game.num_agents();
  ValueTable values(game.horizon(), m, S);
  std::vector<double> next(S);
  for (int h = game.horizon() - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const auto mu = joint_action_distribution(mix, h, s);
      for (int i = 0; i < m; ++i) {
        for (int sn = 0; sn < S; ++sn) next[sn] = values.at(h + 1, i, sn);
        double v = 0.0;
        for (int ja = 0; ja < game.num_joint_actions(); ++ja) {
          if (mu[ja] == 0.0) continue;
          v += mu[ja] * (game.reward(h, i, s, ja) +
                         detail::expected_next(game, h, s, ja, next));
        }
        values.at(h, i, s) = v;
      }
    }
  }
  return values;
}

/// Backward induction against the per-step correlated opponent marginal.
/// Ties go to the lowest action index.
inline BestResponse best_response(const MarkovGame& game,
                                  const StepMixturePolicy& mix, int agent) {
  detail::check_compatible(game, mix);
  if (agent < 0 || agent >= game.num_agents())
    throw DimensionError("agent out of range");
  const int S = game.num_states();
  const int H = game.horizon();
  const auto& space = game.joint_space();
  BestResponse br;
  br.agent = agent;
  br.action.assign(H, std::vector<int>(S, 0));
  br.value.assign(H + 1, std::vector<double>(S, 0.0));
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      const auto marginal = opponent_marginal(mix, h, s, agent);
      double best = -1.0;
      int best_action = 0;
      for (int a = 0; a < game.actions(agent); ++a) {
        double q = 0.0;
        for (std::size_t o = 0; o < marginal.size(); ++o) {
          if (marginal[o] == 0.0) continue;
          const int ja = space.combine(agent, a, static_cast<int>(o));
          q += marginal[o] * (game.reward(h, agent, s, ja) +
                              detail::expected_next(game, h, s, ja,
                                                    br.value[h + 1]));
        }
        if (a == 0 || q > best) {
          best = q;
          best_action = a;
        }
      }
      br.action[h][s] = best_action;
      br.value[h][s] = best;
    }
  }
  return br;
}

inline GapReport cce_gap(const MarkovGame& game, const StepMixturePolicy& mix) {
  const ValueTable values = evaluate_values(game, mix);
  const int s1 = game.initial_state();
  GapReport report;
  for (int i = 0; i < game.num_agents(); ++i) {
    const BestResponse br = best_response(game, mix, i);
    report.policy_value.push_back(values.at(0, i, s1));
    report.best_response_value.push_back(br.value[0][s1]);
    report.gap.push_back(br.value[0][s1] - values.at(0, i, s1));
  }
  report.max_gap = *std::max_element(report.gap.begin(), report.gap.end());
  return report;
}

/// Samples one episode from s_1: at each step draw a component k by the
/// weights, then each agent's action from pi^k_{h,i}.
inline Trajectory sample_trajectory(const MarkovGame& game,
                                    const StepMixturePolicy& mix, Rng& rng) {
  const auto& space = game.joint_space();
  Trajectory episode;
  episode.reserve(game.horizon());
  std::vector<int> actions(game.num_agents());
  int s = game.initial_state();
  for (int h = 0; h < game.horizon(); ++h) {
    const int k = sample_index(mix.weights(h), rng.uniform());
    for (int i = 0; i < game.num_agents(); ++i)
      actions[i] = sample_index(mix.probs(h, k, i, s), rng.uniform());
    TrajectoryStep step;
    step.step = h;
    step.state = s;
    step.joint_action = space.encode(actions);
    for (int i = 0; i < game.num_agents(); ++i)
      step.rewards.push_back(game.reward(h, i, s, step.joint_action));
    step.next_state =
        sample_index(game.transition(h, s, step.joint_action), rng.uniform());
    s = step.next_state;
    episode.push_back(std::move(step));
  }
  return episode;
}

struct MonteCarloEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
};

inline MonteCarloEstimate monte_carlo_value(const MarkovGame& game,
                                            const StepMixturePolicy& mix,
                                            std::int64_t trajectories,
                                            std::uint64_t seed) {
  detail::check_compatible(game, mix);
  if (trajectories < 1) throw DimensionError("need at least one trajectory");
  const int m = game.num_agents();
  Rng rng(seed);
  std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
  for (std::int64_t n = 0; n < trajectories; ++n) {
    std::vector<double> ret(m, 0.0);
    for (const auto& step : sample_trajectory(game, mix, rng))
      for (int i = 0; i < m; ++i) ret[i] += step.rewards[i];
    for (int i = 0; i < m; ++i) {
      sum[i] += ret[i];
      sum_sq[i] += ret[i] * ret[i];
    }
  }
  MonteCarloEstimate est;
  const double n = static_cast<double>(trajectories);
  for (int i = 0; i < m; ++i) {
    const double mean = sum[i] / n;
    const double var =
        n > 1 ? std::max(0.0, (sum_sq[i] - n * mean * mean) / (n - 1)) : 0.0;
    est.mean.push_back(mean);
    est.std_error.push_back(std::sqrt(var / n));
  }
  return est;
}

}  // namespace lincce

#endif  // LINCCE_ORACLE_HPP
