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

#ifndef LINCCE_CORESET_HPP
#define LINCCE_CORESET_HPP

#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lincce/errors.hpp"
#include "lincce/features.hpp"

namespace lincce {

/// Upper bound on the number of pairs the greedy coverage loop can add to
/// one core set:
///   e/(e-1) * (1+tau)/tau * d * (log(1 + 1/tau) + log(1 + 1/lambda)).
inline double c_max(int dim, double tau, double lambda) {
  if (dim < 1 || !(tau > 0.0) || !(lambda > 0.0))
    throw DimensionError("c_max needs d >= 1, tau > 0, lambda > 0");
  constexpr double e = std::numbers::e;
  return e / (e - 1.0) * (1.0 + tau) / tau * dim *
         (std::log1p(1.0 / tau) + std::log1p(1.0 / lambda));
}

/// Core set D of (state, action) pairs with the regularized design matrix
/// Lambda = lambda I + sum phi phi^T and its inverse. The inverse is updated
/// by Sherman-Morrison and recomputed from Lambda every `refresh_interval`
/// additions (0 disables the refresh).
class CoreSet {
 public:
  CoreSet(int dim, double lambda, double tau, int refresh_interval = 64)
      : lambda_(lambda),
        tau_(tau),
        refresh_interval_(refresh_interval),
        design_(Eigen::MatrixXd::Identity(dim, dim) * lambda),
        inverse_(Eigen::MatrixXd::Identity(dim, dim) / lambda) {
    if (dim < 1 || !(lambda > 0.0) || !(tau > 0.0))
      throw DimensionError("core set needs d >= 1, lambda > 0, tau > 0");
  }

  int dim() const noexcept { return static_cast<int>(design_.rows()); }
  double lambda() const noexcept { return lambda_; }
  double tau() const noexcept { return tau_; }
  int size() const noexcept { return static_cast<int>(pairs_.size()); }
  const std::vector<std::pair<int, int>>& pairs() const noexcept {
    return pairs_;
  }
  const Eigen::MatrixXd& design() const noexcept { return design_; }
  const Eigen::MatrixXd& inverse() const noexcept { return inverse_; }

  /// phi^T Lambda^{-1} phi
  template <typename Derived>
  double quadratic_form(const Eigen::MatrixBase<Derived>& phi) const {
    return phi.dot(inverse_ * phi);
  }

  template <typename Derived>
  void add(int s, int a, const Eigen::MatrixBase<Derived>& phi) {
    pairs_.emplace_back(s, a);
    design_.noalias() += phi * phi.transpose();
    const Eigen::VectorXd u = inverse_ * phi;
    const double denom = 1.0 + phi.dot(u);
    inverse_.noalias() -= (u * u.transpose()) / denom;
    if (refresh_interval_ > 0 && ++since_refresh_ >= refresh_interval_)
      refresh();
  }

  /// Recomputes Lambda^{-1} from Lambda.
  void refresh() {
    inverse_ = design_.llt().solve(
        Eigen::MatrixXd::Identity(design_.rows(), design_.cols()));
    since_refresh_ = 0;
  }

 private:
  double lambda_;
  double tau_;
  int refresh_interval_;
  int since_refresh_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  Eigen::MatrixXd design_;
  Eigen::MatrixXd inverse_;
};

/// max_a phi(s,a)^T Lambda^{-1} phi(s,a), with the maximizing action (lowest
/// index on ties).
inline std::pair<double, int> max_uncertainty(const CoreSet& core,
                                              const FeatureMap& fmap, int s) {
  double best = -1.0;
  int best_action = 0;
  for (int a = 0; a < fmap.num_actions(); ++a) {
    const double u = core.quadratic_form(fmap.phi(s, a));
    if (u > best) {
      best = u;
      best_action = a;
    }
  }
  return {best, best_action};
}

inline double uncertainty(const CoreSet& core, const FeatureMap& fmap, int s) {
  return max_uncertainty(core, fmap, s).first;
}

/// s is well covered when its uncertainty is at most tau (boundary included).
inline bool confident(const CoreSet& core, const FeatureMap& fmap, int s) {
  return uncertainty(core, fmap, s) <= core.tau();
}

inline void add_pair(CoreSet& core, const FeatureMap& fmap, int s, int a) {
  core.add(s, a, fmap.phi(s, a));
}

/// Greedy coverage of state s at one step: for each agent in order, add the
/// most uncertain action at s until the uncertainty is at most tau. Returns
/// the number of pairs added across agents.
inline int explore(std::span<CoreSet> cores, std::span<const FeatureMap> fmaps,
                   int s) {
  int added = 0;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    for (;;) {
      const auto [u, a] = max_uncertainty(cores[i], fmaps[i], s);
      if (u <= cores[i].tau()) break;
      add_pair(cores[i], fmaps[i], s, a);
      ++added;
    }
  }
  return added;
}

/// theta = Lambda^{-1} sum_j phi(s_j, a_j) q_j over the core pairs.
inline Eigen::VectorXd ridge_coefficients(const CoreSet& core,
                                          const FeatureMap& fmap,
                                          std::span<const double> targets) {
  if (targets.size() != core.pairs().size())
    throw DimensionError("one target per core pair is required");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(core.dim());
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto [s, a] = core.pairs()[j];
    rhs.noalias() += targets[j] * fmap.phi(s, a);
  }
  return core.inverse() * rhs;
}

inline double ridge_evaluate(const CoreSet& core, const FeatureMap& fmap,
                             std::span<const double> targets, int s, int a) {
  return fmap.phi(s, a).dot(ridge_coefficients(core, fmap, targets));
}

}  // namespace lincce

#endif  // LINCCE_CORESET_HPP
