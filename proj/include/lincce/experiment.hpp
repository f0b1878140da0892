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

#ifndef LINCCE_EXPERIMENT_HPP
#define LINCCE_EXPERIMENT_HPP

// Experiment configuration, seeded single runs, parameter sweeps and the
// CSV rows they emit.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lincce/errors.hpp"
#include "lincce/features.hpp"
#include "lincce/ftrl.hpp"
#include "lincce/game.hpp"
#include "lincce/generators.hpp"
#include "lincce/io.hpp"
#include "lincce/oracle.hpp"
#include "lincce/random_access.hpp"
#include "lincce/simulator.hpp"

namespace lincce {

enum class Algorithm { kLinConfidentFtrl, kRandomAccess };

inline std::string to_string(Algorithm a) {
  return a == Algorithm::kLinConfidentFtrl ? "lin_confident_ftrl" : "random_access";
}

struct ExperimentConfig {
  json game;
  json features = {{"kind", "one_hot"}};
  Algorithm algorithm = Algorithm::kLinConfidentFtrl;
  AccessProtocol protocol = AccessProtocol::kLocalAccess;
  double epsilon = 0.25;
  double c_K = 1.0;
  double c_tau = 1.0;
  /// Explicit overrides of the derived learner parameters.
  std::optional<int> K, N;
  std::optional<double> tau, lambda;
  double delta = 0.05;
  double c_eta = 2.0;
  std::int64_t restart_budget = 0;
  std::string alpha = "harmonic";
  double c_alpha = 1.0;
  BonusMode bonus = BonusMode::kZero;
  double c_b = 1.0;
  std::vector<std::uint64_t> seeds = {0};
  std::string csv_path, policy_path, ledger_path, report_path;
  /// Directory used to resolve relative paths inside the config.
  std::filesystem::path base_dir = ".";
};

namespace detail {

inline std::string resolve_path(const ExperimentConfig& c, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? p : (c.base_dir / path).string();
}

}  // namespace detail

/// Parses and validates a JSON experiment configuration.
inline ExperimentConfig parse_config(const json& j,
                                     const std::filesystem::path& base_dir = ".") {
  ExperimentConfig c;
  c.base_dir = base_dir;
  try {
    if (!j.contains("game")) throw ConfigError("config needs a 'game' entry");
    c.game = j.at("game");
    if (j.contains("features")) c.features = j.at("features");
    const std::string algo = j.value("algorithm", "lin_confident_ftrl");
    if (algo == "lin_confident_ftrl") {
      c.algorithm = Algorithm::kLinConfidentFtrl;
      c.protocol = AccessProtocol::kLocalAccess;
    } else if (algo == "random_access") {
      c.algorithm = Algorithm::kRandomAccess;
      c.protocol = AccessProtocol::kRandomAccess;
    } else {
      throw ConfigError("unknown algorithm '" + algo + "'");
    }
    if (j.contains("protocol")) {
      const std::string p = j.at("protocol").get<std::string>();
      const std::string expected = to_string(c.protocol);
      if (p != expected)
        throw ConfigError("algorithm " + algo + " requires protocol " +
                          expected + ", got " + p);
    }
    c.epsilon = j.value("epsilon", c.epsilon);
    if (!(c.epsilon > 0)) throw ConfigError("epsilon must be positive");
    if (j.contains("params")) {
      const json& p = j.at("params");
      if (p.contains("K")) c.K = p.at("K").get<int>();
      if (p.contains("N")) c.N = p.at("N").get<int>();
      if (p.contains("tau")) c.tau = p.at("tau").get<double>();
      if (p.contains("lambda")) c.lambda = p.at("lambda").get<double>();
      c.delta = p.value("delta", c.delta);
      c.c_eta = p.value("c_eta", c.c_eta);
      c.c_K = p.value("c_K", c.c_K);
      c.c_tau = p.value("c_tau", c.c_tau);
      c.restart_budget = p.value("restart_budget", c.restart_budget);
      if ((c.K && *c.K < 1) || (c.N && *c.N < 1) || (c.tau && !(*c.tau > 0)) ||
          (c.lambda && !(*c.lambda > 0)) || !(c.delta > 0) || !(c.c_eta > 0) ||
          !(c.c_K > 0) || !(c.c_tau > 0) || c.restart_budget < 0)
        throw ConfigError("learner parameters must be positive");
    }
    if (j.contains("random_access")) {
      const json& r = j.at("random_access");
      c.alpha = r.value("alpha", c.alpha);
      if (c.alpha != "harmonic" && c.alpha != "rescaled_linear")
        throw ConfigError("alpha must be 'harmonic' or 'rescaled_linear'");
      c.c_alpha = r.value("c_alpha", c.c_alpha);
      const std::string bonus = r.value("bonus", "zero");
      if (bonus == "zero") c.bonus = BonusMode::kZero;
      else if (bonus == "tabular") c.bonus = BonusMode::kTabular;
      else throw ConfigError("bonus must be 'zero' or 'tabular'");
      c.c_b = r.value("c_b", c.c_b);
    }
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("output")) {
      const json& o = j.at("output");
      c.csv_path = o.value("csv", "");
      c.policy_path = o.value("policy", "");
      c.ledger_path = o.value("ledger", "");
      c.report_path = o.value("report", "");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  const json& g = c.game;
  if (g.contains("file") &&
      !std::filesystem::exists(detail::resolve_path(c, g.at("file").get<std::string>())))
    throw ConfigError("game file does not exist");
  if (c.features.value("kind", "") == "file")
    for (const auto& p : c.features.at("paths"))
      if (!std::filesystem::exists(detail::resolve_path(c, p.get<std::string>())))
        throw ConfigError("feature file does not exist");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  return parse_config(read_json_file(path),
                      std::filesystem::path(path).parent_path());
}

/// Builds the game named by the config and checks its invariants.
inline MarkovGame build_game(const ExperimentConfig& c) {
  const json& g = c.game;
  auto positive = [](int v, const char* what) {
    if (v < 1) throw ConfigError(std::string(what) + " must be positive");
    return v;
  };
  std::optional<MarkovGame> game;
  try {
    if (g.contains("file")) {
      game = game_from_json(read_json_file(detail::resolve_path(c, g.at("file").get<std::string>())));
    } else if (g.contains("inline")) {
      game = game_from_json(g.at("inline"));
    } else {
      const std::string kind = g.value("generator", "");
      if (kind == "random_tabular") {
        const int S = positive(g.at("S").get<int>(), "S");
        const int H = positive(g.at("H").get<int>(), "H");
        std::vector<int> A;
        if (g.at("A").is_array()) {
          A = g.at("A").get<std::vector<int>>();
        } else {
          A.assign(positive(g.value("m", 2), "m"), g.at("A").get<int>());
        }
        for (int a : A) positive(a, "A");
        game = generate_random_tabular(S, A, H, g.value("seed", std::uint64_t{0}));
      } else if (kind == "matrix_game") {
        game = matrix_game(g.at("payoffs").get<std::vector<std::vector<double>>>(),
                           g.at("A").get<std::vector<int>>(),
                           positive(g.value("H", 1), "H"));
      } else if (kind == "chain") {
        game = chain_game(positive(g.at("S").get<int>(), "S"),
                          positive(g.at("H").get<int>(), "H"),
                          positive(g.value("m", 1), "m"),
                          positive(g.value("A", 1), "A"));
      } else if (kind == "matching_pennies") {
        game = matching_pennies(positive(g.value("H", 1), "H"));
      } else if (kind == "prisoners_dilemma") {
        game = prisoners_dilemma(positive(g.value("H", 1), "H"));
      } else {
        throw ConfigError("unknown game generator '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed game entry: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("invalid game: ") + e.what());
  }
  const auto issues = validate_game(*game);
  if (!issues.empty()) throw ConfigError("invalid game: " + issues.front());
  return std::move(*game);
}

inline std::vector<FeatureMap> build_features(const ExperimentConfig& c,
                                              const MarkovGame& game) {
  std::vector<FeatureMap> fmaps;
  const std::string kind = c.features.value("kind", "one_hot");
  try {
    for (int i = 0; i < game.num_agents(); ++i) {
      if (kind == "one_hot") {
        fmaps.push_back(FeatureMap::one_hot(game.num_states(), game.actions(i)));
      } else if (kind == "file") {
        const auto& paths = c.features.at("paths");
        if (static_cast<int>(paths.size()) != game.num_agents())
          throw ConfigError("one feature file per agent is required");
        fmaps.push_back(feature_map_from_json(
            read_json_file(detail::resolve_path(c, paths[i].get<std::string>())),
            game.num_states(), game.actions(i)));
      } else if (kind == "inline") {
        const auto& maps = c.features.at("maps");
        if (static_cast<int>(maps.size()) != game.num_agents())
          throw ConfigError("one feature map per agent is required");
        fmaps.push_back(feature_map_from_json(maps[i], game.num_states(),
                                              game.actions(i)));
      } else {
        throw ConfigError("unknown feature kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed features entry: ") + e.what());
  } catch (const DimensionError& e) {
    throw ConfigError(std::string("invalid features: ") + e.what());
  }
  return fmaps;
}

/// Derived defaults with explicit overrides applied. lambda follows K
/// (1/(K d H^2)) unless given.
inline LearnerParams resolve_params(const ExperimentConfig& c,
                                    const MarkovGame& game,
                                    std::span<const FeatureMap> fmaps) {
  LearnerParams p = default_learner_params(game, fmaps, c.epsilon, c.c_K, c.c_tau);
  int d = 1;
  for (const auto& f : fmaps) d = std::max(d, f.dim());
  if (c.K) p.K = *c.K;
  if (c.N) p.N = *c.N;
  if (c.tau) p.tau = *c.tau;
  const double H = game.horizon();
  p.lambda = c.lambda ? *c.lambda : 1.0 / (static_cast<double>(p.K) * d * H * H);
  p.delta = c.delta;
  p.c_eta = c.c_eta;
  p.restart_budget = c.restart_budget;
  return p;
}

inline RAParams resolve_ra_params(const ExperimentConfig& c,
                                  const LearnerParams& p) {
  RAParams r;
  r.K = p.K;
  r.tau = p.tau;
  r.lambda = p.lambda;
  r.delta = p.delta;
  r.c_eta = p.c_eta;
  r.alpha = c.alpha == "harmonic" ? harmonic_alpha(p.K)
                                  : rescaled_linear_alpha(p.K, c.c_alpha);
  r.bonus = c.bonus;
  r.c_b = c.c_b;
  return r;
}

struct RunRecord {
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::kLinConfidentFtrl;
  int K = 0;
  int N = 0;
  double tau = 0.0;
  double lambda = 0.0;
  std::int64_t total_samples = 0;
  std::array<std::int64_t, kNumPhases> phase_samples{};
  std::int64_t restarts = 0;
  std::int64_t restart_budget = 0;
  std::int64_t violations = 0;
  std::vector<double> gaps;
  double max_gap = 0.0;
  double wall_ms = 0.0;
};

struct ExperimentResult {
  RunRecord record;
  StepMixturePolicy policy;
  RunReport report;
  SampleLedger ledger;
};

/// Builds game, features and simulator, runs the configured learner and
/// scores its output with the exact CCE gap.
inline ExperimentResult run_experiment(const ExperimentConfig& c,
                                       std::uint64_t seed,
                                       bool record_ledger = false) {
  const auto start = std::chrono::steady_clock::now();
  const MarkovGame game = build_game(c);
  std::vector<FeatureMap> fmaps = build_features(c, game);
  const LearnerParams params = resolve_params(c, game, fmaps);
  Simulator sim(game, c.protocol, mix64(seed ^ 0x5eedULL), record_ledger);
  const std::uint64_t learner_seed = mix64(seed ^ 0x1ea4ULL);
  std::optional<LearnerOutput> out;
  if (c.algorithm == Algorithm::kLinConfidentFtrl)
    out = run_lin_confident_ftrl(sim, std::move(fmaps), params, learner_seed);
  else
    out = run_random_access(sim, std::move(fmaps), resolve_ra_params(c, params),
                            learner_seed);
  const auto& ledger = sim.ledger();
  if (ledger.total_queries != out->report.total_samples)
    throw InvariantViolation("learner counted " +
                             std::to_string(out->report.total_samples) +
                             " samples but the simulator served " +
                             std::to_string(ledger.total_queries));
  if (ledger.violation_count != 0)
    throw InvariantViolation("learner issued protocol-violating queries");
  const GapReport gap = cce_gap(game, out->policy);

  RunRecord r;
  r.seed = seed;
  r.algorithm = c.algorithm;
  r.K = params.K;
  r.N = params.N;
  r.tau = params.tau;
  r.lambda = params.lambda;
  r.total_samples = out->report.total_samples;
  r.phase_samples = out->report.phase_samples;
  r.restarts = out->report.restarts;
  r.restart_budget = out->report.restart_budget;
  r.violations = ledger.violation_count;
  r.gaps = gap.gap;
  r.max_gap = gap.max_gap;
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start).count();
  return {std::move(r), std::move(out->policy), std::move(out->report), ledger};
}

inline void write_csv_header(std::ostream& out, int num_agents,
                             const std::string& prefix = "") {
  out << prefix
      << "seed,algorithm,K,N,tau,lambda,total_samples,init_samples,"
         "learn_samples,rollout_samples,single_agent_samples,"
         "final_rollout_samples,restarts,";
  for (int i = 0; i < num_agents; ++i) out << "gap_agent_" << i << ',';
  out << "max_gap,wall_ms\n";
}

inline void write_csv_row(std::ostream& out, const RunRecord& r) {
  std::ostringstream row;
  row << std::setprecision(12);
  row << r.seed << ',' << to_string(r.algorithm) << ',' << r.K << ',' << r.N
      << ',' << r.tau << ',' << r.lambda << ',' << r.total_samples;
  for (int p = 0; p < kNumPhases - 1; ++p) row << ',' << r.phase_samples[p];
  row << ',' << r.restarts;
  for (double g : r.gaps) row << ',' << g;
  row << ',' << r.max_gap << ',' << std::fixed << std::setprecision(1) << r.wall_ms;
  out << row.str() << '\n';
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct SweepRow {
  std::string param;
  double value = 0.0;
  RunRecord record;
};

struct SweepSummary {
  std::string param;
  double value = 0.0;
  int runs = 0;
  double median_max_gap = 0.0;
  double mean_max_gap = 0.0;
  double std_max_gap = 0.0;
  double median_total_samples = 0.0;
};

inline ExperimentConfig with_param(ExperimentConfig c, const std::string& param,
                                   double value) {
  if (param == "K") c.K = static_cast<int>(value);
  else if (param == "N") c.N = static_cast<int>(value);
  else if (param == "tau") c.tau = value;
  else if (param == "lambda") c.lambda = value;
  else throw ConfigError("unknown sweep parameter '" + param + "'");
  return c;
}

/// One run per (value, seed) in value order then seed order. For
/// param == "seeds" the values are the seeds themselves.
inline std::vector<SweepRow> sweep(const ExperimentConfig& c,
                                   const std::string& param,
                                   const std::vector<double>& values) {
  static const std::vector<std::string> known = {"K", "N", "tau", "lambda", "seeds"};
  if (std::find(known.begin(), known.end(), param) == known.end())
    throw ConfigError("unknown sweep parameter '" + param + "'");
  std::vector<SweepRow> rows;
  if (param == "seeds") {
    for (double v : values)
      rows.push_back({param, v,
                      run_experiment(c, static_cast<std::uint64_t>(v)).record});
    return rows;
  }
  for (double v : values) {
    const ExperimentConfig cv = with_param(c, param, v);
    for (auto seed : c.seeds) rows.push_back({param, v, run_experiment(cv, seed).record});
  }
  return rows;
}

/// Median/mean/std of max_gap per swept value; a seeds sweep is one group.
inline std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::map<double, std::vector<const SweepRow*>> groups;
  std::vector<double> order;
  for (const auto& r : rows) {
    const double key = r.param == "seeds" ? 0.0 : r.value;
    if (!groups.count(key)) order.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SweepSummary> out;
  for (double key : order) {
    const auto& g = groups[key];
    std::vector<double> gaps, samples;
    for (const auto* r : g) {
      gaps.push_back(r->record.max_gap);
      samples.push_back(static_cast<double>(r->record.total_samples));
    }
    SweepSummary s;
    s.param = g.front()->param;
    s.value = key;
    s.runs = static_cast<int>(g.size());
    s.median_max_gap = median(gaps);
    double mean = 0.0;
    for (double x : gaps) mean += x;
    mean /= gaps.size();
    double var = 0.0;
    for (double x : gaps) var += (x - mean) * (x - mean);
    s.mean_max_gap = mean;
    s.std_max_gap = gaps.size() > 1 ? std::sqrt(var / (gaps.size() - 1)) : 0.0;
    s.median_total_samples = median(samples);
    out.push_back(s);
  }
  return out;
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<SweepSummary>& summary) {
  out << "param,value,runs,median_max_gap,mean_max_gap,std_max_gap,"
         "median_total_samples\n";
  out << std::setprecision(12);
  for (const auto& s : summary)
    out << s.param << ',' << s.value << ',' << s.runs << ',' << s.median_max_gap
        << ',' << s.mean_max_gap << ',' << s.std_max_gap << ','
        << s.median_total_samples << '\n';
}

}  // namespace lincce

#endif  // LINCCE_EXPERIMENT_HPP
