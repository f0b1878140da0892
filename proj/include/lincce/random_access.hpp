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

#ifndef LINCCE_RANDOM_ACCESS_HPP
#define LINCCE_RANDOM_ACCESS_HPP

// Random-access variant: core sets covering every (s, a) are chosen upfront,
// so a single backward pass suffices. Iterates are blended with learning
// rates alpha_k and the output mixes the K product policies with weights
// alpha_k^K.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lincce/coreset.hpp"
#include "lincce/errors.hpp"
#include "lincce/features.hpp"
#include "lincce/ftrl.hpp"
#include "lincce/game.hpp"
#include "lincce/random.hpp"
#include "lincce/simulator.hpp"

namespace lincce {

/// alpha_k = 1/k. Blending then reduces to a plain running average.
inline std::vector<double> harmonic_alpha(int K) {
  std::vector<double> alpha(K);
  for (int k = 1; k <= K; ++k) alpha[k - 1] = 1.0 / k;
  return alpha;
}

/// alpha_k = c log K / (k - 1 + c log K); alpha_1 = 1 (also when K = 1).
inline std::vector<double> rescaled_linear_alpha(int K, double c_alpha) {
  std::vector<double> alpha(K);
  const double c = c_alpha * std::log(static_cast<double>(K));
  for (int k = 1; k <= K; ++k) alpha[k - 1] = k == 1 ? 1.0 : c / (k - 1 + c);
  return alpha;
}

/// alpha_i^K = alpha_i prod_{j=i+1}^K (1 - alpha_j).
inline std::vector<double> mixture_weights(std::span<const double> alpha) {
  if (alpha.empty() || alpha[0] != 1.0)
    throw DimensionError("learning-rate schedule must start with alpha_1 = 1");
  const std::size_t K = alpha.size();
  std::vector<double> w(K);
  double tail = 1.0;
  for (std::size_t i = K; i-- > 0;) {
    w[i] = alpha[i] * tail;
    tail *= 1.0 - alpha[i];
  }
  return w;
}

/// c_b sqrt(log^3(K S sum_i A_i / delta) / (K H)) sum_k w_k (Var_k + H).
inline double tabular_bonus(int K, int horizon, double delta, int num_states,
                            int action_sum, double c_b,
                            std::span<const double> weights,
                            std::span<const double> variances) {
  if (weights.size() != variances.size())
    throw DimensionError("one variance per iteration is required");
  const double l = std::log(static_cast<double>(K) * num_states * action_sum / delta);
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k)
    total += weights[k] * (variances[k] + horizon);
  return c_b * std::sqrt(l * l * l / (static_cast<double>(K) * horizon)) * total;
}

/// Greedy coverage of every (s, a): add the globally most uncertain pair
/// (lowest (s, a) index on ties) until the maximum is at most tau.
inline CoreSet select_core_set(const FeatureMap& fmap, double tau, double lambda,
                               int refresh_interval = 64) {
  CoreSet core(fmap.dim(), lambda, tau, refresh_interval);
  for (;;) {
    double best = -1.0;
    int best_s = 0, best_a = 0;
    for (int s = 0; s < fmap.num_states(); ++s)
      for (int a = 0; a < fmap.num_actions(); ++a) {
        const double u = core.quadratic_form(fmap.phi(s, a));
        if (u > best) {
          best = u;
          best_s = s;
          best_a = a;
        }
      }
    if (best <= tau) break;
    add_pair(core, fmap, best_s, best_a);
  }
  return core;
}

inline std::vector<CoreSet> select_core_sets(std::span<const FeatureMap> fmaps,
                                             double tau, double lambda,
                                             int refresh_interval = 64) {
  std::vector<CoreSet> cores;
  for (const auto& f : fmaps)
    cores.push_back(select_core_set(f, tau, lambda, refresh_interval));
  return cores;
}

inline bool is_one_hot(const FeatureMap& fmap) {
  const Eigen::Index n = fmap.table().cols();
  return fmap.table().rows() == n &&
         fmap.table().isApprox(Eigen::MatrixXd::Identity(n, n), 0.0);
}

enum class BonusMode { kZero, kTabular };

struct RAParams {
  int K = 1024;
  double tau = 1.0;
  double lambda = 1e-3;
  double delta = 0.05;
  /// alpha_1..alpha_K; empty selects 1/k.
  std::vector<double> alpha;
  /// eta[i][k] scales Q^{k-1} in pi^k_i, k in [2, K+1]; empty selects
  /// ftrl_step_size(k) per agent.
  std::vector<std::vector<double>> eta;
  double c_eta = 2.0;
  BonusMode bonus = BonusMode::kZero;
  double c_b = 1.0;
  int refresh_interval = 64;
};

class RandomAccessLearner {
 public:
  RandomAccessLearner(Simulator& sim, std::vector<FeatureMap> fmaps,
                      RAParams params, std::uint64_t seed)
      : sim_(&sim),
        game_(&sim.game()),
        fmaps_(std::move(fmaps)),
        params_(std::move(params)),
        rng_(seed) {
    const int m = game_->num_agents();
    if (params_.K < 1 || !(params_.tau > 0) || !(params_.lambda > 0) ||
        !(params_.delta > 0) || params_.c_b < 0)
      throw ConfigError("random-access parameters must be positive");
    if (static_cast<int>(fmaps_.size()) != m)
      throw DimensionError("one feature map per agent is required");
    for (int i = 0; i < m; ++i)
      if (fmaps_[i].num_states() != game_->num_states() ||
          fmaps_[i].num_actions() != game_->actions(i))
        throw DimensionError("feature map does not match the game");
    if (params_.alpha.empty()) params_.alpha = harmonic_alpha(params_.K);
    if (static_cast<int>(params_.alpha.size()) != params_.K)
      throw ConfigError("alpha schedule must have K entries");
    for (double a : params_.alpha)
      if (!(a > 0.0 && a <= 1.0)) throw ConfigError("alpha_k must lie in (0, 1]");
    weights_ = mixture_weights(params_.alpha);
    if (params_.eta.empty()) {
      params_.eta.assign(m, std::vector<double>(params_.K + 2, 0.0));
      for (int i = 0; i < m; ++i) {
        const double g = gamma_hat(fmaps_[i].dim(), game_->actions(i),
                                   game_->num_states(), params_.tau,
                                   params_.delta, fmaps_[i].nu());
        for (int k = 0; k <= params_.K + 1; ++k)
          params_.eta[i][k] = ftrl_step_size(k, params_.K, game_->actions(i),
                                             game_->horizon(), g, params_.c_eta);
      }
    }
    if (static_cast<int>(params_.eta.size()) != m)
      throw ConfigError("eta schedule needs one row per agent");
    for (const auto& row : params_.eta)
      if (static_cast<int>(row.size()) < params_.K + 1)
        throw ConfigError("eta schedule needs entries up to K");
    if (params_.bonus == BonusMode::kTabular)
      for (const auto& f : fmaps_)
        if (!is_one_hot(f))
          throw ConfigError("the tabular bonus needs one-hot features");
    cores_ = select_core_sets(fmaps_, params_.tau, params_.lambda,
                              params_.refresh_interval);
    steps_.assign(game_->horizon(), std::vector<AgentStep>(m));
  }

  const RAParams& params() const noexcept { return params_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<CoreSet>& cores() const noexcept { return cores_; }
  const RunReport& report() const noexcept { return report_; }

  /// pi^k_{h,i}(.|s): uniform for k = 1, else softmax(eta_k Q^{k-1}(s,.))
  /// with Q^{k-1} the blended coefficients.
  std::vector<double> iterate_policy(int h, int agent, int k, int s) const {
    const int A = game_->actions(agent);
    if (k <= 1) return std::vector<double>(A, 1.0 / A);
    const Eigen::VectorXd q =
        fmaps_[agent].evaluate(s, steps_.at(h)[agent].blended.col(k - 1));
    return ftrl_policy(q, params_.eta[agent][k]);
  }

  /// Blended coefficients (1 - alpha_k) theta^{k-1} + alpha_k theta^k_ls.
  Eigen::VectorXd blended_coefficients(int h, int agent, int k) const {
    return steps_.at(h).at(agent).blended.col(k);
  }
  Eigen::VectorXd regression_coefficients(int h, int agent, int k) const {
    return steps_.at(h).at(agent).regression.col(k - 1);
  }

  double value_estimate(int h, int agent, int s) const {
    if (h >= game_->horizon()) return 0.0;
    return steps_.at(h).at(agent).value.at(s);
  }
  double bonus(int h, int agent, int s) const {
    return steps_.at(h).at(agent).bonus.at(s);
  }

  /// One backward step: K rounds of sampling over each D_i, regression,
  /// blending and softmax, then the weighted value estimate.
  void learn_step(int h) {
    const int m = game_->num_agents();
    const int K = params_.K;
    const int S = game_->num_states();
    const int H = game_->horizon();
    for (int i = 0; i < m; ++i) {
      auto& st = steps_[h][i];
      st.regression = Eigen::MatrixXd::Zero(fmaps_[i].dim(), K);
      st.blended = Eigen::MatrixXd::Zero(fmaps_[i].dim(), K + 1);
    }
    std::vector<double> targets;
    std::vector<int> actions(m);
    for (int k = 1; k <= K; ++k) {
      for (int i = 0; i < m; ++i) {
        const auto& core = cores_[i];
        targets.resize(core.size());
        for (int j = 0; j < core.size(); ++j) {
          const auto [s, a] = core.pairs()[j];
          for (int o = 0; o < m; ++o)
            if (o != i)
              actions[o] = sample_index(iterate_policy(h, o, k, s), rng_.uniform());
          actions[i] = a;
          sim_->set_phase(Phase::kLearn);
          const auto result = sim_->query(h, s, game_->joint_space().encode(actions));
          ++report_.total_samples;
          ++report_.phase_samples[static_cast<int>(Phase::kLearn)];
          targets[j] = result.rewards[i] + value_estimate(h + 1, i, result.next_state);
        }
        auto& st = steps_[h][i];
        const double alpha = params_.alpha[k - 1];
        st.regression.col(k - 1) = ridge_coefficients(core, fmaps_[i], targets);
        st.blended.col(k) = (1.0 - alpha) * st.blended.col(k - 1) +
                            alpha * st.regression.col(k - 1);
      }
    }
    int action_sum = 0;
    for (int a : game_->action_counts()) action_sum += a;
    for (int i = 0; i < m; ++i) {
      auto& st = steps_[h][i];
      const int A = game_->actions(i);
      st.value.assign(S, 0.0);
      st.bonus.assign(S, 0.0);
      std::vector<double> variances(K);
      for (int s = 0; s < S; ++s) {
        const auto block =
            fmaps_[i].table().middleCols(static_cast<Eigen::Index>(s) * A, A);
        const Eigen::MatrixXd q = block.transpose() * st.regression;
        double total = 0.0;
        for (int k = 1; k <= K; ++k) {
          const auto pi = iterate_policy(h, i, k, s);
          double mean = 0.0, second = 0.0;
          for (int a = 0; a < A; ++a) {
            mean += pi[a] * q(a, k - 1);
            second += pi[a] * q(a, k - 1) * q(a, k - 1);
          }
          total += weights_[k - 1] * mean;
          variances[k - 1] = std::max(0.0, second - mean * mean);
        }
        if (params_.bonus == BonusMode::kTabular)
          st.bonus[s] = tabular_bonus(K, H, params_.delta, S, action_sum,
                                      params_.c_b, weights_, variances);
        st.value[s] = std::min(total + st.bonus[s], static_cast<double>(H - h));
      }
    }
  }

  /// Output mixture at each step: weights alpha_k^K over pi^1..pi^K.
  StepMixturePolicy output_policy() const {
    const int H = game_->horizon();
    const int K = params_.K;
    const int S = game_->num_states();
    std::vector<StepMixturePolicy::Step> steps(H);
    for (int h = 0; h < H; ++h) {
      steps[h].weights = weights_;
      for (int k = 1; k <= K; ++k)
        for (int i = 0; i < game_->num_agents(); ++i)
          for (int s = 0; s < S; ++s) {
            const auto pi = iterate_policy(h, i, k, s);
            steps[h].probs.insert(steps[h].probs.end(), pi.begin(), pi.end());
          }
    }
    return StepMixturePolicy(S, game_->action_counts(), std::move(steps));
  }

  LearnerOutput run() {
    if (sim_->protocol() != AccessProtocol::kRandomAccess)
      throw ConfigError("random_access requires a random-access simulator");
    const int H = game_->horizon();
    const int m = game_->num_agents();
    for (int h = H - 1; h >= 0; --h) learn_step(h);
    report_.core_sizes.assign(H, std::vector<int>(m));
    for (int h = 0; h < H; ++h)
      for (int i = 0; i < m; ++i) report_.core_sizes[h][i] = cores_[i].size();
    return {output_policy(), report_};
  }

 private:
  struct AgentStep {
    Eigen::MatrixXd regression;  // d x K, column k-1 holds theta^k_ls
    Eigen::MatrixXd blended;     // d x (K+1), column k holds theta^k
    std::vector<double> value;
    std::vector<double> bonus;
  };

  Simulator* sim_;
  const MarkovGame* game_;
  std::vector<FeatureMap> fmaps_;
  RAParams params_;
  Rng rng_;
  std::vector<double> weights_;
  std::vector<CoreSet> cores_;
  std::vector<std::vector<AgentStep>> steps_;
  RunReport report_;
};

inline LearnerOutput run_random_access(Simulator& sim,
                                       std::vector<FeatureMap> fmaps,
                                       RAParams params, std::uint64_t seed) {
  RandomAccessLearner learner(sim, std::move(fmaps), std::move(params), seed);
  return learner.run();
}

}  // namespace lincce

#endif  // LINCCE_RANDOM_ACCESS_HPP
