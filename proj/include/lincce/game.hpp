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

#ifndef LINCCE_GAME_HPP
#define LINCCE_GAME_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lincce/errors.hpp"

namespace lincce {

/// Row-major flattening of joint actions over (a_0, ..., a_{m-1}); the last
/// agent's action varies fastest.
class JointActionSpace {
 public:
  JointActionSpace() = default;
  explicit JointActionSpace(std::vector<int> action_counts)
      : counts_(std::move(action_counts)), strides_(counts_.size(), 1) {
    for (int i = static_cast<int>(counts_.size()) - 2; i >= 0; --i)
      strides_[i] = strides_[i + 1] * counts_[i + 1];
    size_ = counts_.empty() ? 0 : strides_[0] * counts_[0];
  }

  int size() const noexcept { return size_; }
  int num_agents() const noexcept { return static_cast<int>(counts_.size()); }
  int actions(int agent) const { return counts_.at(agent); }
  const std::vector<int>& counts() const noexcept { return counts_; }

  int encode(std::span<const int> actions) const {
    int index = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i)
      index += actions[i] * strides_[i];
    return index;
  }

  int action_of(int joint, int agent) const {
    return (joint / strides_[agent]) % counts_[agent];
  }

  std::vector<int> decode(int joint) const {
    std::vector<int> actions(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i)
      actions[i] = action_of(joint, static_cast<int>(i));
    return actions;
  }

  /// Number of joint actions of all agents but `agent`.
  int opponent_size(int agent) const { return size_ / counts_.at(agent); }

  /// Index of a_{-i} in the row-major space of the other agents.
  int opponent_index(int joint, int agent) const {
    int index = 0;
    for (int j = 0; j < num_agents(); ++j) {
      if (j == agent) continue;
      index = index * counts_[j] + action_of(joint, j);
    }
    return index;
  }

  /// Joint index obtained by inserting `action` for `agent` into the
  /// opponents' joint index.
  int combine(int agent, int action, int opponent_joint) const {
    int joint = action * strides_[agent];
    for (int j = num_agents() - 1; j >= 0; --j) {
      if (j == agent) continue;
      joint += (opponent_joint % counts_[j]) * strides_[j];
      opponent_joint /= counts_[j];
    }
    return joint;
  }

 private:
  std::vector<int> counts_;
  std::vector<int> strides_;
  int size_ = 0;
};

/// Finite-horizon general-sum Markov game with dense tabular dynamics.
/// Steps are 0-based: h in [0, H). Rewards are deterministic.
class MarkovGame {
 public:
  /// `transitions` is laid out [h][s][joint][s'], `rewards` [h][i][s][joint].
  MarkovGame(int num_states, std::vector<int> action_counts, int horizon,
             int initial_state, std::vector<double> transitions,
             std::vector<double> rewards)
      : num_states_(num_states),
        horizon_(horizon),
        initial_state_(initial_state),
        joint_(std::move(action_counts)),
        transitions_(std::move(transitions)),
        rewards_(std::move(rewards)) {
    if (num_states_ < 1 || horizon_ < 1 || joint_.num_agents() < 1)
      throw DimensionError("game needs S >= 1, H >= 1 and m >= 1");
    for (int a : joint_.counts())
      if (a < 1) throw DimensionError("every agent needs at least one action");
    const std::size_t cells = static_cast<std::size_t>(horizon_) *
                              num_states_ * joint_.size();
    if (transitions_.size() != cells * num_states_)
      throw DimensionError("transition tensor has wrong size");
    if (rewards_.size() != cells * num_agents())
      throw DimensionError("reward tensor has wrong size");
  }

  int num_states() const noexcept { return num_states_; }
  int num_agents() const noexcept { return joint_.num_agents(); }
  int horizon() const noexcept { return horizon_; }
  int initial_state() const noexcept { return initial_state_; }
  int actions(int agent) const { return joint_.actions(agent); }
  const std::vector<int>& action_counts() const noexcept {
    return joint_.counts();
  }
  int num_joint_actions() const noexcept { return joint_.size(); }
  const JointActionSpace& joint_space() const noexcept { return joint_; }

  std::span<const double> transition(int h, int s, int joint) const {
    return {transitions_.data() + transition_offset(h, s, joint),
            static_cast<std::size_t>(num_states_)};
  }

  double reward(int h, int agent, int s, int joint) const {
    return rewards_[((static_cast<std::size_t>(h) * num_agents() + agent) *
                         num_states_ + s) * joint_.size() + joint];
  }

  const std::vector<double>& transition_tensor() const noexcept {
    return transitions_;
  }
  const std::vector<double>& reward_tensor() const noexcept { return rewards_; }

  bool valid_step(int h) const noexcept { return h >= 0 && h < horizon_; }
  bool valid_state(int s) const noexcept { return s >= 0 && s < num_states_; }

 private:
  std::size_t transition_offset(int h, int s, int joint) const {
    return ((static_cast<std::size_t>(h) * num_states_ + s) * joint_.size() +
            joint) * num_states_;
  }

  int num_states_;
  int horizon_;
  int initial_state_;
  JointActionSpace joint_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
};

/// Lists every violated invariant; empty iff the game is well formed.
inline std::vector<std::string> validate_game(const MarkovGame& game) {
  std::vector<std::string> issues;
  const int S = game.num_states();
  if (game.initial_state() < 0 || game.initial_state() >= S) {
    issues.push_back("initial state " + std::to_string(game.initial_state()) +
                     " out of range");
  }
  for (int h = 0; h < game.horizon(); ++h) {
    for (int s = 0; s < S; ++s) {
      for (int ja = 0; ja < game.num_joint_actions(); ++ja) {
        const auto row = game.transition(h, s, ja);
        double total = 0.0;
        bool negative = false;
        for (double p : row) {
          total += p;
          negative = negative || p < 0.0 || !std::isfinite(p);
        }
        if (negative || std::abs(total - 1.0) > 1e-12) {
          std::ostringstream msg;
          msg << "transition row (h=" << h << ",s=" << s << ",a=" << ja
              << ") sums to " << total << (negative ? " with negative entries" : "");
          issues.push_back(msg.str());
        }
        for (int i = 0; i < game.num_agents(); ++i) {
          const double r = game.reward(h, i, s, ja);
          if (!(r >= 0.0 && r <= 1.0)) {
            std::ostringstream msg;
            msg << "reward (h=" << h << ",i=" << i << ",s=" << s
                << ",a=" << ja << ") = " << r << " outside [0,1]";
            issues.push_back(msg.str());
          }
        }
      }
    }
  }
  return issues;
}

/// Markov product policy: a distribution over A_i for every (h, i, s).
class ProductPolicy {
 public:
  /// `tables[h][i]` is laid out [s][a].
  ProductPolicy(int num_states, std::vector<int> action_counts,
                std::vector<std::vector<std::vector<double>>> tables)
      : num_states_(num_states),
        counts_(std::move(action_counts)),
        tables_(std::move(tables)) {
    for (const auto& step : tables_) {
      if (step.size() != counts_.size())
        throw DimensionError("policy table has wrong agent count");
      for (std::size_t i = 0; i < counts_.size(); ++i)
        if (step[i].size() != static_cast<std::size_t>(num_states_) * counts_[i])
          throw DimensionError("policy table has wrong size");
    }
  }

  int horizon() const noexcept { return static_cast<int>(tables_.size()); }
  int num_states() const noexcept { return num_states_; }
  int num_agents() const noexcept { return static_cast<int>(counts_.size()); }
  const std::vector<int>& action_counts() const noexcept { return counts_; }

  std::span<const double> probs(int h, int agent, int s) const {
    const int A = counts_[agent];
    return {tables_[h][agent].data() + static_cast<std::size_t>(s) * A,
            static_cast<std::size_t>(A)};
  }

  const std::vector<double>& table(int h, int agent) const {
    return tables_[h][agent];
  }

 private:
  int num_states_;
  std::vector<int> counts_;
  std::vector<std::vector<std::vector<double>>> tables_;
};

inline ProductPolicy uniform_policy(const MarkovGame& game) {
  std::vector<std::vector<std::vector<double>>> tables(game.horizon());
  for (auto& step : tables) {
    for (int i = 0; i < game.num_agents(); ++i) {
      const int A = game.actions(i);
      step.emplace_back(static_cast<std::size_t>(game.num_states()) * A,
                        1.0 / A);
    }
  }
  return ProductPolicy(game.num_states(), game.action_counts(),
                       std::move(tables));
}

/// Per step h, a weighted mixture of K product policies. At every step the
/// component index is drawn afresh from the weights, then every agent acts
/// independently under that component.
class StepMixturePolicy {
 public:
  struct Step {
    std::vector<double> weights;
    /// Laid out [k][i][s][a].
    std::vector<double> probs;
  };

  StepMixturePolicy(int num_states, std::vector<int> action_counts,
                    std::vector<Step> steps)
      : num_states_(num_states),
        counts_(std::move(action_counts)),
        agent_offset_(counts_.size() + 1, 0),
        steps_(std::move(steps)) {
    for (std::size_t i = 0; i < counts_.size(); ++i)
      agent_offset_[i + 1] =
          agent_offset_[i] + static_cast<std::size_t>(num_states_) * counts_[i];
    for (const auto& step : steps_) {
      if (step.weights.empty())
        throw DimensionError("mixture step needs at least one component");
      if (step.probs.size() != step.weights.size() * component_size())
        throw DimensionError("mixture step has wrong probability table size");
    }
  }

  static StepMixturePolicy from_product(const ProductPolicy& policy) {
    std::vector<Step> steps(policy.horizon());
    for (int h = 0; h < policy.horizon(); ++h) {
      steps[h].weights = {1.0};
      for (int i = 0; i < policy.num_agents(); ++i) {
        const auto& t = policy.table(h, i);
        steps[h].probs.insert(steps[h].probs.end(), t.begin(), t.end());
      }
    }
    return StepMixturePolicy(policy.num_states(), policy.action_counts(),
                             std::move(steps));
  }

  int horizon() const noexcept { return static_cast<int>(steps_.size()); }
  int num_states() const noexcept { return num_states_; }
  int num_agents() const noexcept { return static_cast<int>(counts_.size()); }
  const std::vector<int>& action_counts() const noexcept { return counts_; }
  int num_components(int h) const {
    return static_cast<int>(steps_.at(h).weights.size());
  }
  std::span<const double> weights(int h) const { return steps_.at(h).weights; }
  const Step& step(int h) const { return steps_.at(h); }

  std::span<const double> probs(int h, int k, int agent, int s) const {
    const auto& step = steps_[h];
    return {step.probs.data() + k * component_size() + agent_offset_[agent] +
                static_cast<std::size_t>(s) * counts_[agent],
            static_cast<std::size_t>(counts_[agent])};
  }

  std::size_t component_size() const noexcept { return agent_offset_.back(); }

 private:
  int num_states_;
  std::vector<int> counts_;
  std::vector<std::size_t> agent_offset_;
  std::vector<Step> steps_;
};

/// Lists violated probability invariants of a mixture (weights and every
/// component distribution nonnegative and summing to 1).
inline std::vector<std::string> validate_policy(const StepMixturePolicy& mix,
                                                double tol = 1e-12) {
  std::vector<std::string> issues;
  auto check = [&](std::span<const double> v, const std::string& what) {
    double total = 0.0;
    bool negative = false;
    for (double x : v) {
      total += x;
      negative = negative || x < 0.0 || !std::isfinite(x);
    }
    if (negative || std::abs(total - 1.0) > tol)
      issues.push_back(what + " is not a distribution (sum " +
                       std::to_string(total) + ")");
  };
  for (int h = 0; h < mix.horizon(); ++h) {
    check(mix.weights(h), "weights at h=" + std::to_string(h));
    for (int k = 0; k < mix.num_components(h); ++k)
      for (int i = 0; i < mix.num_agents(); ++i)
        for (int s = 0; s < mix.num_states(); ++s)
          check(mix.probs(h, k, i, s),
                "policy (h=" + std::to_string(h) + ",k=" + std::to_string(k) +
                    ",i=" + std::to_string(i) + ",s=" + std::to_string(s) + ")");
  }
  return issues;
}

namespace detail {

inline void check_indices(const StepMixturePolicy& mix, int h, int s) {
  if (h < 0 || h >= mix.horizon())
    throw DimensionError("step " + std::to_string(h) + " out of range");
  if (s < 0 || s >= mix.num_states())
    throw DimensionError("state " + std::to_string(s) + " out of range");
}

}  // namespace detail

/// Distribution over flattened joint actions at (h, s):
/// sum_k w_k prod_i pi^k_{h,i}(a_i | s).
inline std::vector<double> joint_action_distribution(
    const StepMixturePolicy& mix, int h, int s) {
  detail::check_indices(mix, h, s);
  const JointActionSpace space(mix.action_counts());
  std::vector<double> dist(space.size(), 0.0);
  const auto weights = mix.weights(h);
  for (int k = 0; k < mix.num_components(h); ++k) {
    if (weights[k] == 0.0) continue;
    for (int ja = 0; ja < space.size(); ++ja) {
      double p = weights[k];
      for (int i = 0; i < space.num_agents() && p != 0.0; ++i)
        p *= mix.probs(h, k, i, s)[space.action_of(ja, i)];
      dist[ja] += p;
    }
  }
  return dist;
}

/// Distribution over the opponents' joint action a_{-i} at (h, s), laid out
/// row-major over agents j != i. Not a product distribution when K > 1.
inline std::vector<double> opponent_marginal(const StepMixturePolicy& mix,
                                             int h, int s, int agent) {
  detail::check_indices(mix, h, s);
  if (agent < 0 || agent >= mix.num_agents())
    throw DimensionError("agent " + std::to_string(agent) + " out of range");
  std::vector<int> others;
  for (int j = 0; j < mix.num_agents(); ++j)
    if (j != agent) others.push_back(mix.action_counts()[j]);
  const JointActionSpace space(others);
  const int size = others.empty() ? 1 : space.size();
  std::vector<double> dist(size, 0.0);
  const auto weights = mix.weights(h);
  for (int k = 0; k < mix.num_components(h); ++k) {
    if (weights[k] == 0.0) continue;
    for (int o = 0; o < size; ++o) {
      double p = weights[k];
      int slot = 0;
      for (int j = 0; j < mix.num_agents() && p != 0.0; ++j) {
        if (j == agent) continue;
        p *= mix.probs(h, k, j, s)[space.action_of(o, slot)];
        ++slot;
      }
      dist[o] += p;
    }
  }
  return dist;
}

/// One transition of a sampled episode.
struct TrajectoryStep {
  int step = 0;
  int state = 0;
  int joint_action = 0;
  std::vector<double> rewards;
  int next_state = 0;
};

using Trajectory = std::vector<TrajectoryStep>;

}  // namespace lincce

#endif  // LINCCE_GAME_HPP
