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

#ifndef LINCCE_IO_HPP
#define LINCCE_IO_HPP

// JSON readers and writers for games, mixture policies, feature maps, gap
// reports and core sets.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lincce/coreset.hpp"
#include "lincce/errors.hpp"
#include "lincce/features.hpp"
#include "lincce/game.hpp"
#include "lincce/oracle.hpp"

namespace lincce {

using nlohmann::json;

inline json game_to_json(const MarkovGame& game) {
  const int H = game.horizon(), S = game.num_states(), m = game.num_agents();
  const int J = game.num_joint_actions();
  json P = json::array();
  for (int h = 0; h < H; ++h) {
    json ph = json::array();
    for (int s = 0; s < S; ++s) {
      json ps = json::array();
      for (int ja = 0; ja < J; ++ja) {
        const auto row = game.transition(h, s, ja);
        ps.push_back(std::vector<double>(row.begin(), row.end()));
      }
      ph.push_back(std::move(ps));
    }
    P.push_back(std::move(ph));
  }
  json r = json::array();
  for (int h = 0; h < H; ++h) {
    json rh = json::array();
    for (int i = 0; i < m; ++i) {
      json ri = json::array();
      for (int s = 0; s < S; ++s) {
        std::vector<double> row(J);
        for (int ja = 0; ja < J; ++ja) row[ja] = game.reward(h, i, s, ja);
        ri.push_back(std::move(row));
      }
      rh.push_back(std::move(ri));
    }
    r.push_back(std::move(rh));
  }
  return {{"S", S}, {"m", m}, {"H", H}, {"A", game.action_counts()},
          {"s1", game.initial_state()}, {"P", std::move(P)}, {"r", std::move(r)}};
}

namespace detail {

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw DimensionError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DimensionError(std::string("bad field '") + key + "': " + e.what());
  }
}

inline void expect_size(const json& j, std::size_t n, const std::string& what) {
  if (!j.is_array() || j.size() != n)
    throw DimensionError(what + " must be an array of length " + std::to_string(n));
}

}  // namespace detail

inline MarkovGame game_from_json(const json& j) {
  const int S = detail::require<int>(j, "S");
  const int m = detail::require<int>(j, "m");
  const int H = detail::require<int>(j, "H");
  const auto A = detail::require<std::vector<int>>(j, "A");
  const int s1 = detail::require<int>(j, "s1");
  if (static_cast<int>(A.size()) != m) throw DimensionError("A must have m entries");
  if (S < 1 || H < 1 || m < 1) throw DimensionError("S, H and m must be positive");
  const JointActionSpace space(A);
  const int J = space.size();
  const json& P = j.at("P");
  const json& r = j.at("r");
  std::vector<double> transitions, rewards;
  transitions.reserve(static_cast<std::size_t>(H) * S * J * S);
  detail::expect_size(P, H, "P");
  for (int h = 0; h < H; ++h) {
    detail::expect_size(P[h], S, "P[h]");
    for (int s = 0; s < S; ++s) {
      detail::expect_size(P[h][s], J, "P[h][s]");
      for (int ja = 0; ja < J; ++ja) {
        detail::expect_size(P[h][s][ja], S, "P[h][s][a]");
        for (const auto& x : P[h][s][ja]) transitions.push_back(x.get<double>());
      }
    }
  }
  detail::expect_size(r, H, "r");
  for (int h = 0; h < H; ++h) {
    detail::expect_size(r[h], m, "r[h]");
    for (int i = 0; i < m; ++i) {
      detail::expect_size(r[h][i], S, "r[h][i]");
      for (int s = 0; s < S; ++s) {
        detail::expect_size(r[h][i][s], J, "r[h][i][s]");
        for (const auto& x : r[h][i][s]) rewards.push_back(x.get<double>());
      }
    }
  }
  return MarkovGame(S, A, H, s1, std::move(transitions), std::move(rewards));
}

/// {"S", "A", "H", "steps": [{"weights": [K], "policies": [k][i][s][a]}]}
inline json policy_to_json(const StepMixturePolicy& mix) {
  json steps = json::array();
  for (int h = 0; h < mix.horizon(); ++h) {
    json comps = json::array();
    for (int k = 0; k < mix.num_components(h); ++k) {
      json agents = json::array();
      for (int i = 0; i < mix.num_agents(); ++i) {
        json states = json::array();
        for (int s = 0; s < mix.num_states(); ++s) {
          const auto p = mix.probs(h, k, i, s);
          states.push_back(std::vector<double>(p.begin(), p.end()));
        }
        agents.push_back(std::move(states));
      }
      comps.push_back(std::move(agents));
    }
    const auto w = mix.weights(h);
    steps.push_back({{"weights", std::vector<double>(w.begin(), w.end())},
                     {"policies", std::move(comps)}});
  }
  return {{"S", mix.num_states()}, {"A", mix.action_counts()},
          {"H", mix.horizon()}, {"steps", std::move(steps)}};
}

inline StepMixturePolicy policy_from_json(const json& j) {
  const int S = detail::require<int>(j, "S");
  const auto A = detail::require<std::vector<int>>(j, "A");
  const int H = detail::require<int>(j, "H");
  const json& steps_json = j.at("steps");
  detail::expect_size(steps_json, H, "steps");
  std::vector<StepMixturePolicy::Step> steps(H);
  for (int h = 0; h < H; ++h) {
    steps[h].weights = detail::require<std::vector<double>>(steps_json[h], "weights");
    const json& comps = steps_json[h].at("policies");
    detail::expect_size(comps, steps[h].weights.size(), "policies");
    for (const auto& comp : comps) {
      detail::expect_size(comp, A.size(), "policies[k]");
      for (std::size_t i = 0; i < A.size(); ++i) {
        detail::expect_size(comp[i], S, "policies[k][i]");
        for (const auto& probs : comp[i]) {
          detail::expect_size(probs, A[i], "policies[k][i][s]");
          for (const auto& x : probs) steps[h].probs.push_back(x.get<double>());
        }
      }
    }
  }
  StepMixturePolicy mix(S, A, std::move(steps));
  const auto issues = validate_policy(mix, 1e-9);
  if (!issues.empty()) throw DimensionError("invalid policy: " + issues.front());
  return mix;
}

inline json feature_map_to_json(const FeatureMap& fmap) {
  json phi = json::array();
  for (int s = 0; s < fmap.num_states(); ++s) {
    json row = json::array();
    for (int a = 0; a < fmap.num_actions(); ++a) {
      const Eigen::VectorXd v = fmap.phi(s, a);
      row.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    }
    phi.push_back(std::move(row));
  }
  json j = {{"d", fmap.dim()}, {"phi", std::move(phi)}};
  if (fmap.nu()) j["nu"] = *fmap.nu();
  return j;
}

/// Accepts {"d": int, "phi": [s][a][d], "nu"?: number} or {"kind": "one_hot"}.
inline FeatureMap feature_map_from_json(const json& j, int num_states,
                                        int num_actions) {
  if (j.contains("kind")) {
    if (j.at("kind").get<std::string>() != "one_hot")
      throw DimensionError("unknown feature kind");
    return FeatureMap::one_hot(num_states, num_actions);
  }
  const int d = detail::require<int>(j, "d");
  if (d < 1) throw DimensionError("feature dimension must be positive");
  const json& phi = j.at("phi");
  detail::expect_size(phi, num_states, "phi");
  Eigen::MatrixXd table(d, static_cast<Eigen::Index>(num_states) * num_actions);
  for (int s = 0; s < num_states; ++s) {
    detail::expect_size(phi[s], num_actions, "phi[s]");
    for (int a = 0; a < num_actions; ++a) {
      detail::expect_size(phi[s][a], d, "phi[s][a]");
      for (int c = 0; c < d; ++c)
        table(c, static_cast<Eigen::Index>(s) * num_actions + a) =
            phi[s][a][c].get<double>();
    }
  }
  std::optional<double> nu;
  if (j.contains("nu")) nu = j.at("nu").get<double>();
  return FeatureMap(num_states, num_actions, std::move(table), nu);
}

inline json gap_report_to_json(const GapReport& report) {
  return {{"policy_value", report.policy_value},
          {"best_response_value", report.best_response_value},
          {"gap", report.gap},
          {"max_gap", report.max_gap}};
}

inline json core_sets_to_json(std::span<const CoreSet> cores) {
  json out = json::array();
  for (std::size_t i = 0; i < cores.size(); ++i) {
    json pairs = json::array();
    for (const auto& [s, a] : cores[i].pairs()) pairs.push_back({s, a});
    out.push_back({{"agent", i},
                   {"lambda", cores[i].lambda()},
                   {"tau", cores[i].tau()},
                   {"size", cores[i].size()},
                   {"pairs", std::move(pairs)}});
  }
  return out;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path + ": " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(1) << '\n';
}

}  // namespace lincce

#endif  // LINCCE_IO_HPP
