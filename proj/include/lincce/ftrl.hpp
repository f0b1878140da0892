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

#ifndef LINCCE_FTRL_HPP
#define LINCCE_FTRL_HPP

// Core-set based FTRL learner for coarse correlated equilibria under local
// access: multi-agent FTRL learning backward in h, rollout checks of the
// learned mixture and of approximate best responses, and restart on every
// newly discovered uncertain state.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lincce/coreset.hpp"
#include "lincce/errors.hpp"
#include "lincce/features.hpp"
#include "lincce/game.hpp"
#include "lincce/random.hpp"
#include "lincce/simulator.hpp"

namespace lincce {

struct LearnerParams {
  int K = 1024;           ///< FTRL iterations per step
  int N = 16;             ///< rollout trajectories per check
  double tau = 1.0;       ///< coverage threshold
  double lambda = 1e-3;   ///< ridge regularizer
  double delta = 0.05;    ///< confidence level (enters gamma_hat)
  double epsilon = 0.25;  ///< target accuracy (bookkeeping only)
  double c_eta = 2.0;     ///< step-size constant
  /// 0 selects ceil(m * H * C_max).
  std::int64_t restart_budget = 0;
  /// Lambda^{-1} full recompute period.
  int refresh_interval = 64;
};

inline void validate_params(const LearnerParams& p) {
  if (p.K < 1 || p.N < 1 || !(p.tau > 0) || !(p.lambda > 0) ||
      !(p.delta > 0) || !(p.epsilon > 0) || !(p.c_eta > 0) ||
      p.restart_budget < 0)
    throw ConfigError("learner parameters must all be positive");
}

/// Scale of the regression estimates used to normalize FTRL losses:
/// min{1 + sqrt(tau log(S A / delta)) + nu sqrt(d), sqrt(d)} when nu is
/// declared, sqrt(d) otherwise.
inline double gamma_hat(int dim, int num_actions, int num_states, double tau,
                        double delta, std::optional<double> nu) {
  const double root_d = std::sqrt(static_cast<double>(dim));
  if (!nu) return root_d;
  const double bound =
      1.0 +
      std::sqrt(tau * std::log(static_cast<double>(num_states) * num_actions /
                               delta)) +
      *nu * root_d;
  return std::min(bound, root_d);
}

/// eta_k = k sqrt(2 log A / K) / (c_eta H gamma_hat).
inline double ftrl_step_size(int k, int K, int num_actions, int horizon,
                             double gamma, double c_eta) {
  return k * std::sqrt(2.0 * std::log(static_cast<double>(num_actions)) / K) /
         (c_eta * horizon * gamma);
}

/// softmax(eta * q), shifted by the max for overflow safety.
inline std::vector<double> ftrl_policy(std::span<const double> q, double eta) {
  std::vector<double> p(q.size());
  if (q.empty()) return p;
  const double top = eta * *std::max_element(q.begin(), q.end());
  double z = 0.0;
  for (std::size_t a = 0; a < q.size(); ++a) {
    p[a] = std::exp(eta * q[a] - top);
    z += p[a];
  }
  for (double& x : p) x /= z;
  return p;
}

inline std::vector<double> ftrl_policy(const Eigen::VectorXd& q, double eta) {
  return ftrl_policy(std::span<const double>(q.data(), q.size()), eta);
}

/// Default (K, tau, N, lambda) following the two parameter regimes: when
/// min{log(S)/d, A} <= eps^-2, tau = 1 and
/// K = c_K H^4 d eps^-2 min{ceil(log(S)/d), A}; otherwise K = c_K H^4 d eps^-2
/// and tau = c_tau eps^2 / (H^4 d). N = ceil(H^2/eps^2), lambda = 1/(K d H^2).
inline LearnerParams default_learner_params(const MarkovGame& game,
                                            std::span<const FeatureMap> fmaps,
                                            double epsilon, double c_K = 1.0,
                                            double c_tau = 1.0) {
  int d = 1, A = 1;
  for (const auto& f : fmaps) d = std::max(d, f.dim());
  for (int a : game.action_counts()) A = std::max(A, a);
  const double H = game.horizon();
  const double logS_over_d = std::log(static_cast<double>(game.num_states())) / d;
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  LearnerParams p;
  p.epsilon = epsilon;
  const double base = c_K * std::pow(H, 4) * d * inv_eps2;
  if (std::min(logS_over_d, static_cast<double>(A)) <= inv_eps2) {
    const double factor =
        std::max(1.0, std::min(std::ceil(logS_over_d), static_cast<double>(A)));
    p.tau = 1.0;
    p.K = static_cast<int>(std::ceil(base * factor));
  } else {
    p.K = static_cast<int>(std::ceil(base));
    p.tau = c_tau * epsilon * epsilon / (std::pow(H, 4) * d);
  }
  p.N = static_cast<int>(std::ceil(H * H * inv_eps2));
  p.lambda = 1.0 / (p.K * d * H * H);
  return p;
}

/// Fills a full joint action at (h, s).
template <typename T>
concept JointSampler = requires(const T& t, int h, int s, Rng& rng,
                                std::span<int> actions) {
  { t.sample_joint(h, s, rng, actions) } -> std::same_as<void>;
};

/// Per-step correlation device of a materialized mixture.
struct MixtureJointSampler {
  const StepMixturePolicy* mix = nullptr;

  void sample_joint(int h, int s, Rng& rng, std::span<int> actions) const {
    const int k = sample_index(mix->weights(h), rng.uniform());
    for (int i = 0; i < mix->num_agents(); ++i)
      actions[i] = sample_index(mix->probs(h, k, i, s), rng.uniform());
  }
};

struct ProgressRecord {
  std::int64_t restart_index = 0;
  Phase phase = Phase::kLearn;
  int step = 0;
  int new_state = 0;
  std::int64_t samples_so_far = 0;
};

struct RunReport {
  std::int64_t total_samples = 0;
  std::array<std::int64_t, kNumPhases> phase_samples{};
  std::int64_t restarts = 0;
  std::int64_t restart_budget = 0;
  std::vector<ProgressRecord> progress;
  /// core_sizes[h][i]
  std::vector<std::vector<int>> core_sizes;

  std::int64_t phase(Phase p) const { return phase_samples[static_cast<int>(p)]; }
};

struct LearnerOutput {
  StepMixturePolicy policy;
  RunReport report;
};

class LinConfidentFtrl {
 public:
  LinConfidentFtrl(Simulator& sim, std::vector<FeatureMap> fmaps,
                   LearnerParams params, std::uint64_t seed)
      : sim_(&sim),
        game_(&sim.game()),
        fmaps_(std::move(fmaps)),
        params_(params),
        rng_(seed) {
    validate_params(params_);
    const int m = game_->num_agents();
    if (static_cast<int>(fmaps_.size()) != m)
      throw DimensionError("one feature map per agent is required");
    for (int i = 0; i < m; ++i) {
      if (fmaps_[i].num_states() != game_->num_states() ||
          fmaps_[i].num_actions() != game_->actions(i))
        throw DimensionError("feature map " + std::to_string(i) +
                             " does not match the game");
    }
    const int H = game_->horizon();
    int max_dim = 1;
    for (const auto& f : fmaps_) max_dim = std::max(max_dim, f.dim());
    c_max_ = c_max(max_dim, params_.tau, params_.lambda);
    restart_budget_ =
        params_.restart_budget > 0
            ? params_.restart_budget
            : static_cast<std::int64_t>(std::ceil(m * H * c_max_));
    cores_.resize(H);
    confident_cache_.assign(H, std::vector<signed char>(game_->num_states(), -1));
    for (int h = 0; h < H; ++h)
      for (int i = 0; i < m; ++i)
        cores_[h].emplace_back(fmaps_[i].dim(), params_.lambda, params_.tau,
                               params_.refresh_interval);
    gamma_.resize(m);
    for (int i = 0; i < m; ++i)
      gamma_[i] = gamma_hat(fmaps_[i].dim(), game_->actions(i),
                            game_->num_states(), params_.tau, params_.delta,
                            fmaps_[i].nu());
    reset_epoch();
  }

  const LearnerParams& params() const noexcept { return params_; }
  const MarkovGame& game() const noexcept { return *game_; }
  const std::vector<FeatureMap>& feature_maps() const noexcept { return fmaps_; }
  double core_size_bound() const noexcept { return c_max_; }
  std::int64_t restart_budget() const noexcept { return restart_budget_; }
  std::int64_t restarts() const noexcept { return report_.restarts; }
  const RunReport& report() const noexcept { return report_; }

  CoreSet& core(int h, int agent) {
    confident_cache_.at(h).assign(game_->num_states(), -1);
    return cores_.at(h).at(agent);
  }
  const CoreSet& core(int h, int agent) const { return cores_.at(h).at(agent); }

  /// eta_k for one agent.
  double step_size(int k, int agent) const {
    return ftrl_step_size(k, params_.K, game_->actions(agent),
                          game_->horizon(), gamma_[agent], params_.c_eta);
  }

  /// s in C_h, i.e. covered for every agent at step h. C_H is every state.
  bool is_confident(int h, int s) {
    if (h >= game_->horizon()) return true;
    auto& cached = confident_cache_[h][s];
    if (cached < 0) {
      bool ok = true;
      for (int i = 0; i < game_->num_agents() && ok; ++i)
        ok = confident(cores_[h][i], fmaps_[i], s);
      cached = ok ? 1 : 0;
    }
    return cached == 1;
  }

  /// Covers s at step h for every agent. Returns the number of pairs added.
  int explore(int h, int s) {
    if (h >= game_->horizon()) return 0;
    confident_cache_[h].assign(game_->num_states(), -1);
    return lincce::explore(std::span<CoreSet>(cores_[h]),
                           std::span<const FeatureMap>(fmaps_), s);
  }

  /// Clears every learned quantity; core sets persist.
  void reset_epoch() {
    const int H = game_->horizon();
    const int m = game_->num_agents();
    const int S = game_->num_states();
    steps_.assign(H, std::vector<AgentStep>(m));
    for (int h = 0; h < H; ++h) {
      for (int i = 0; i < m; ++i) {
        auto& st = steps_[h][i];
        const int d = fmaps_[i].dim();
        st.theta = Eigen::MatrixXd::Zero(d, params_.K);
        st.theta_bar = Eigen::MatrixXd::Zero(d, params_.K + 1);
        st.value.assign(S, kUnset);
        st.dagger_value.assign(S, kUnset);
        st.theta_dagger = Eigen::VectorXd::Zero(d);
      }
    }
  }

  /// pi^k_{h,i}(.|s) for k in [1, K+1]: uniform for k = 1, otherwise
  /// softmax(eta_{k-1} Qbar^{k-1}(s, .)).
  std::vector<double> iterate_policy(int h, int agent, int k, int s) const {
    const int A = game_->actions(agent);
    if (k <= 1) return std::vector<double>(A, 1.0 / A);
    const Eigen::VectorXd q =
        fmaps_[agent].evaluate(s, steps_[h][agent].theta_bar.col(k - 1));
    return ftrl_policy(q, step_size(k - 1, agent));
  }

  /// theta^k (regression of iteration k), k in [1, K].
  Eigen::VectorXd regression_coefficients(int h, int agent, int k) const {
    return steps_.at(h).at(agent).theta.col(k - 1);
  }
  /// theta-bar^k (running average), k in [0, K].
  Eigen::VectorXd averaged_coefficients(int h, int agent, int k) const {
    return steps_.at(h).at(agent).theta_bar.col(k);
  }
  bool learned(int h) const { return steps_.at(h).at(0).learned; }

  /// Vhat_{h,i}(s) = min{(1/K) sum_k <pi^k(s), Q^k(s,.)>, H - h}; before step
  /// h is learned it holds its initial value H - h. Vhat_H = 0.
  double value_estimate(int h, int agent, int s) {
    const int H = game_->horizon();
    if (h >= H) return 0.0;
    auto& st = steps_[h][agent];
    if (!st.learned) return H - h;
    double& v = st.value[s];
    if (std::isnan(v)) {
      const int K = params_.K;
      const auto& fmap = fmaps_[agent];
      const int A = game_->actions(agent);
      const Eigen::MatrixXd q = fmap.table()
                                    .middleCols(static_cast<Eigen::Index>(s) * A, A)
                                    .transpose() * st.theta;
      const Eigen::MatrixXd qbar =
          fmap.table().middleCols(static_cast<Eigen::Index>(s) * A, A).transpose() *
          st.theta_bar;
      double total = 0.0;
      for (int k = 1; k <= K; ++k) {
        std::vector<double> pi;
        if (k == 1) {
          pi.assign(A, 1.0 / A);
        } else {
          const Eigen::VectorXd col = qbar.col(k - 1);
          pi = ftrl_policy(col, step_size(k - 1, agent));
        }
        for (int a = 0; a < A; ++a) total += pi[a] * q(a, k - 1);
      }
      v = std::min(total / K, static_cast<double>(H - h));
    }
    return v;
  }

  /// Qhat-dagger_{h,i}(s, .) from the single-agent regression.
  Eigen::VectorXd best_response_q(int h, int agent, int s) const {
    return fmaps_[agent].evaluate(s, steps_.at(h).at(agent).theta_dagger);
  }

  int best_response_action(int h, int agent, int s) const {
    const Eigen::VectorXd q = best_response_q(h, agent, s);
    int best = 0;
    for (int a = 1; a < q.size(); ++a)
      if (q(a) > q(best)) best = a;
    return best;
  }

  /// Vhat-dagger_{h,i}(s) = max_a Qhat-dagger; initial value H - h, zero at H.
  double best_response_value(int h, int agent, int s) {
    const int H = game_->horizon();
    if (h >= H) return 0.0;
    auto& st = steps_[h][agent];
    if (!st.dagger_learned) return H - h;
    double& v = st.dagger_value[s];
    if (std::isnan(v)) v = best_response_q(h, agent, s).maxCoeff();
    return v;
  }

  /// Samples the initial trajectory under the uniform policy (H queries) and
  /// covers each visited s_h at its step.
  void initialize() {
    const int H = game_->horizon();
    std::vector<int> trajectory(H);
    std::vector<int> actions(game_->num_agents());
    int s = game_->initial_state();
    for (int h = 0; h < H; ++h) {
      trajectory[h] = s;
      for (int i = 0; i < game_->num_agents(); ++i)
        actions[i] = static_cast<int>(rng_.uniform() * game_->actions(i));
      s = query(Phase::kInit, h, s, game_->joint_space().encode(actions))
              .next_state;
    }
    for (int h = 0; h < H; ++h) explore(h, trajectory[h]);
  }

  /// K rounds of FTRL at step h over every agent's core set. Returns false
  /// (after covering the new state) as soon as a sampled next state falls
  /// outside C_{h+1}.
  bool multi_agent_learning(int h) {
    const int m = game_->num_agents();
    const int K = params_.K;
    for (int k = 1; k <= K; ++k) {
      for (int i = 0; i < m; ++i) {
        const auto& core = cores_[h][i];
        const IterateOpponents opponents{this, k};
        targets_.resize(core.size());
        for (int j = 0; j < core.size(); ++j) {
          const auto [s, a] = core.pairs()[j];
          const auto sample = sample_local(Phase::kLearn, h, i, s, a, opponents);
          if (!is_confident(h + 1, sample.next_state)) {
            fail(Phase::kLearn, h + 1, sample.next_state);
            return false;
          }
          targets_[j] = sample.reward + value_estimate(h + 1, i, sample.next_state);
        }
        auto& st = steps_[h][i];
        st.theta.col(k - 1) = ridge_coefficients(core, fmaps_[i], targets_);
        st.theta_bar.col(k) = ((k - 1) * st.theta_bar.col(k - 1) +
                               st.theta.col(k - 1)) / k;
      }
    }
    for (int i = 0; i < m; ++i) steps_[h][i].learned = true;
    return true;
  }

  /// Least-squares value iteration for agent i against the learned mixture
  /// of the others, K samples per core pair.
  bool single_agent_learning(int h, int agent) {
    const int K = params_.K;
    const auto& core = cores_[h][agent];
    const HatOpponents opponents{this};
    targets_.assign(core.size(), 0.0);
    for (int j = 0; j < core.size(); ++j) {
      const auto [s, a] = core.pairs()[j];
      double total = 0.0;
      for (int k = 0; k < K; ++k) {
        const auto sample =
            sample_local(Phase::kSingleAgent, h, agent, s, a, opponents);
        if (!is_confident(h + 1, sample.next_state)) {
          fail(Phase::kSingleAgent, h + 1, sample.next_state);
          return false;
        }
        total += sample.reward + best_response_value(h + 1, agent, sample.next_state);
      }
      targets_[j] = total / K;
    }
    auto& st = steps_[h][agent];
    st.theta_dagger = ridge_coefficients(core, fmaps_[agent], targets_);
    st.dagger_value.assign(game_->num_states(), kUnset);
    st.dagger_learned = true;
    return true;
  }

  /// N episodes from s_1 under the given joint sampler. Returns false (after
  /// covering the new state) on the first next state outside C_{h+1}.
  template <JointSampler Sampler>
  bool policy_rollout(const Sampler& sampler, Phase phase = Phase::kRollout) {
    const int H = game_->horizon();
    std::vector<int> actions(game_->num_agents());
    for (int n = 0; n < params_.N; ++n) {
      int s = game_->initial_state();
      for (int h = 0; h < H; ++h) {
        sampler.sample_joint(h, s, rng_, actions);
        s = query(phase, h, s, game_->joint_space().encode(actions)).next_state;
        if (!is_confident(h + 1, s)) {
          fail(phase, h + 1, s);
          return false;
        }
      }
    }
    return true;
  }

  bool policy_rollout(const StepMixturePolicy& policy) {
    return policy_rollout(MixtureJointSampler{&policy});
  }

  /// Joint sampler for pihat: k ~ Unif[K], then a_i ~ pi^k_{h,i}.
  struct HatSampler {
    const LinConfidentFtrl* self;
    void sample_joint(int h, int s, Rng& rng, std::span<int> actions) const {
      const int k = 1 + static_cast<int>(rng.uniform() * self->params_.K);
      for (int i = 0; i < self->game_->num_agents(); ++i)
        actions[i] = sample_index(self->iterate_policy(h, i, k, s), rng.uniform());
    }
  };

  /// Joint sampler for pihat-dagger_i x pihat_{-i}.
  struct DeviationSampler {
    const LinConfidentFtrl* self;
    int agent;
    void sample_joint(int h, int s, Rng& rng, std::span<int> actions) const {
      HatOpponents{self}.sample(h, s, agent, rng, actions);
      actions[agent] = self->best_response_action(h, agent, s);
    }
  };

  /// The learned mixture pihat_h = (1/K) sum_k prod_i pi^k_{h,i}.
  StepMixturePolicy output_policy() const {
    const int H = game_->horizon();
    const int K = params_.K;
    const int S = game_->num_states();
    std::vector<StepMixturePolicy::Step> steps(H);
    for (int h = 0; h < H; ++h) {
      steps[h].weights.assign(K, 1.0 / K);
      auto& probs = steps[h].probs;
      for (int k = 1; k <= K; ++k)
        for (int i = 0; i < game_->num_agents(); ++i)
          for (int s = 0; s < S; ++s) {
            const auto pi = iterate_policy(h, i, k, s);
            probs.insert(probs.end(), pi.begin(), pi.end());
          }
    }
    return StepMixturePolicy(S, game_->action_counts(), std::move(steps));
  }

  /// Full learner: initialization, policy learning, rollout of pihat,
  /// approximate best responses and their rollouts, restarting from the
  /// learning phase whenever coverage grows.
  LearnerOutput run() {
    if (sim_->protocol() == AccessProtocol::kOnlineAccess)
      throw ConfigError("the core-set learner needs local or random access");
    initialize();
    const int H = game_->horizon();
    const int m = game_->num_agents();
    for (;;) {
      reset_epoch();
      bool ok = true;
      for (int h = H - 1; h >= 0 && ok; --h) ok = multi_agent_learning(h);
      if (ok) ok = policy_rollout(HatSampler{this}, Phase::kRollout);
      for (int i = 0; i < m && ok; ++i)
        for (int h = H - 1; h >= 0 && ok; --h) ok = single_agent_learning(h, i);
      for (int i = 0; i < m && ok; ++i)
        ok = policy_rollout(DeviationSampler{this, i}, Phase::kFinalRollout);
      if (ok) break;
    }
    report_.restart_budget = restart_budget_;
    report_.core_sizes.assign(H, std::vector<int>(m));
    for (int h = 0; h < H; ++h)
      for (int i = 0; i < m; ++i) report_.core_sizes[h][i] = cores_[h][i].size();
    return {output_policy(), report_};
  }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  struct AgentStep {
    Eigen::MatrixXd theta;      // d x K, column k-1 holds theta^k
    Eigen::MatrixXd theta_bar;  // d x (K+1), column k holds theta-bar^k
    std::vector<double> value;
    bool learned = false;
    Eigen::VectorXd theta_dagger;
    std::vector<double> dagger_value;
    bool dagger_learned = false;
  };

  /// Opponents play their current iterate pi^k_{h,j}.
  struct IterateOpponents {
    const LinConfidentFtrl* self;
    int k;
    void sample(int h, int s, int agent, Rng& rng, std::span<int> actions) const {
      for (int j = 0; j < self->game_->num_agents(); ++j)
        if (j != agent)
          actions[j] = sample_index(self->iterate_policy(h, j, k, s), rng.uniform());
    }
  };

  /// Opponents play pihat_{h,-i}: k ~ Unif[K], then a_j ~ pi^k_{h,j}.
  struct HatOpponents {
    const LinConfidentFtrl* self;
    void sample(int h, int s, int agent, Rng& rng, std::span<int> actions) const {
      const int k = 1 + static_cast<int>(rng.uniform() * self->params_.K);
      for (int j = 0; j < self->game_->num_agents(); ++j)
        if (j != agent)
          actions[j] = sample_index(self->iterate_policy(h, j, k, s), rng.uniform());
    }
  };

  QueryResult query(Phase phase, int h, int s, int joint) {
    sim_->set_phase(phase);
    auto result = sim_->query(h, s, joint);
    ++report_.total_samples;
    ++report_.phase_samples[static_cast<int>(phase)];
    return result;
  }

  template <OpponentSampler Opponents>
  LocalSample sample_local(Phase phase, int h, int agent, int s, int a,
                           const Opponents& opponents) {
    sim_->set_phase(phase);
    const auto sample = local_sampling(*sim_, h, agent, s, a, opponents, rng_);
    ++report_.total_samples;
    ++report_.phase_samples[static_cast<int>(phase)];
    return sample;
  }

  void fail(Phase phase, int h, int s) {
    explore(h, s);
    ++report_.restarts;
    report_.progress.push_back(
        {report_.restarts, phase, h, s, report_.total_samples});
    if (report_.restarts > restart_budget_)
      throw RestartBudgetExceeded("restart count " +
                                  std::to_string(report_.restarts) +
                                  " exceeds budget " +
                                  std::to_string(restart_budget_));
  }

  Simulator* sim_;
  const MarkovGame* game_;
  std::vector<FeatureMap> fmaps_;
  LearnerParams params_;
  Rng rng_;
  double c_max_ = 0.0;
  std::int64_t restart_budget_ = 0;
  std::vector<double> gamma_;
  std::vector<std::vector<CoreSet>> cores_;
  std::vector<std::vector<signed char>> confident_cache_;
  std::vector<std::vector<AgentStep>> steps_;
  std::vector<double> targets_;
  RunReport report_;
};

/// Runs the local-access learner end to end.
inline LearnerOutput run_lin_confident_ftrl(Simulator& sim,
                                            std::vector<FeatureMap> fmaps,
                                            const LearnerParams& params,
                                            std::uint64_t seed) {
  if (sim.protocol() != AccessProtocol::kLocalAccess)
    throw ConfigError("lin_confident_ftrl requires a local-access simulator");
  LinConfidentFtrl learner(sim, std::move(fmaps), params, seed);
  return learner.run();
}

}  // namespace lincce

#endif  // LINCCE_FTRL_HPP
