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

#ifndef LINCCE_FEATURES_HPP
#define LINCCE_FEATURES_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lincce/errors.hpp"

namespace lincce {

/// Per-agent feature map phi_i(s, a) in R^d with ||phi|| <= 1. An optional
/// misspecification level nu is carried as declared metadata.
class FeatureMap {
 public:
  /// `table` has one column per (s, a), column index s * A + a.
  FeatureMap(int num_states, int num_actions, Eigen::MatrixXd table,
             std::optional<double> nu = std::nullopt)
      : num_states_(num_states),
        num_actions_(num_actions),
        table_(std::move(table)),
        nu_(nu) {
    if (num_states_ < 1 || num_actions_ < 1 || table_.rows() < 1)
      throw DimensionError("feature map needs S, A, d >= 1");
    if (table_.cols() != static_cast<Eigen::Index>(num_states_) * num_actions_)
      throw DimensionError("feature table must have S*A columns");
    for (Eigen::Index c = 0; c < table_.cols(); ++c) {
      if (!table_.col(c).allFinite() || table_.col(c).norm() > 1.0 + 1e-12)
        throw DimensionError("feature vector " + std::to_string(c) +
                             " has norm above 1");
    }
    if (nu_ && *nu_ < 0.0) throw DimensionError("nu must be nonnegative");
  }

  /// Tabular features e_{s,a} in R^{S*A}; exactly realizable, so nu = 0.
  static FeatureMap one_hot(int num_states, int num_actions) {
    const int d = num_states * num_actions;
    return FeatureMap(num_states, num_actions, Eigen::MatrixXd::Identity(d, d),
                      0.0);
  }

  int dim() const noexcept { return static_cast<int>(table_.rows()); }
  int num_states() const noexcept { return num_states_; }
  int num_actions() const noexcept { return num_actions_; }
  std::optional<double> nu() const noexcept { return nu_; }
  const Eigen::MatrixXd& table() const noexcept { return table_; }

  Eigen::MatrixXd::ConstColXpr phi(int s, int a) const {
    return table_.col(static_cast<Eigen::Index>(s) * num_actions_ + a);
  }

  /// phi(s, .)^T theta for every action.
  Eigen::VectorXd evaluate(int s, const Eigen::VectorXd& theta) const {
    return table_.middleCols(static_cast<Eigen::Index>(s) * num_actions_,
                             num_actions_)
        .transpose() * theta;
  }

 private:
  int num_states_;
  int num_actions_;
  Eigen::MatrixXd table_;
  std::optional<double> nu_;
};

}  // namespace lincce

#endif  // LINCCE_FEATURES_HPP
