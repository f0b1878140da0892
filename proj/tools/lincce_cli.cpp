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

// Command-line front end: run, sweep, oracle and gen.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spdlog/spdlog.h"

#include "lincce/lincce.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kInvariantViolation = 3;

void setup_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("CCE_LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to "off".
    if (parsed != spdlog::level::off || std::string(level) == "off")
      spdlog::set_level(parsed);
  }
  spdlog::set_pattern("[%l] %v");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw lincce::ConfigError("cannot write " + path);
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw lincce::ConfigError("bad list entry '" + item + "'");
    }
  }
  return values;
}

void log_record(const lincce::RunRecord& r) {
  spdlog::info("seed {} K={} N={} samples={} restarts={}/{} max_gap={:.6f} ({:.0f} ms)",
               r.seed, r.K, r.N, r.total_samples, r.restarts, r.restart_budget,
               r.max_gap, r.wall_ms);
}

int cmd_run(const std::string& config_path, std::uint64_t seed,
            const std::string& out_path) {
  const auto config = lincce::load_config(config_path);
  const bool want_ledger = !config.ledger_path.empty();
  auto result = lincce::run_experiment(config, seed, want_ledger);
  log_record(result.record);
  for (const auto& p : result.report.progress)
    spdlog::debug("restart {} in phase {} at step {} (new state {}, {} samples)",
                  p.restart_index, lincce::to_string(p.phase), p.step,
                  p.new_state, p.samples_so_far);
  auto out = open_output(out_path);
  lincce::write_csv_header(out, static_cast<int>(result.record.gaps.size()));
  lincce::write_csv_row(out, result.record);
  if (!config.policy_path.empty())
    lincce::write_json_file(lincce::detail::resolve_path(config, config.policy_path),
                            lincce::policy_to_json(result.policy));
  if (want_ledger) {
    auto ledger_out =
        open_output(lincce::detail::resolve_path(config, config.ledger_path));
    lincce::write_ledger_csv(result.ledger, ledger_out);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& param,
              const std::string& values, const std::string& out_path,
              const std::string& summary_path) {
  const auto config = lincce::load_config(config_path);
  const auto rows = lincce::sweep(config, param, parse_list(values));
  auto out = open_output(out_path);
  const int m = lincce::build_game(config).num_agents();
  lincce::write_csv_header(out, m);
  for (const auto& row : rows) {
    log_record(row.record);
    lincce::write_csv_row(out, row.record);
  }
  const auto summary = lincce::summarize(rows);
  for (const auto& s : summary)
    spdlog::info("{}={}: runs={} median max_gap={:.6f} std={:.6f}", s.param,
                 s.value, s.runs, s.median_max_gap, s.std_max_gap);
  if (!summary_path.empty()) {
    auto sout = open_output(summary_path);
    lincce::write_summary_csv(sout, summary);
  }
  return 0;
}

int cmd_oracle(const std::string& game_path, const std::string& policy_path,
               const std::string& out_path) {
  lincce::MarkovGame game = [&] {
    try {
      return lincce::game_from_json(lincce::read_json_file(game_path));
    } catch (const lincce::DimensionError& e) {
      throw lincce::ConfigError(e.what());
    }
  }();
  const auto issues = lincce::validate_game(game);
  if (!issues.empty()) throw lincce::ConfigError("invalid game: " + issues.front());
  lincce::StepMixturePolicy policy = [&] {
    try {
      return lincce::policy_from_json(lincce::read_json_file(policy_path));
    } catch (const lincce::DimensionError& e) {
      throw lincce::ConfigError(e.what());
    }
  }();
  if (policy.horizon() != game.horizon() ||
      policy.num_states() != game.num_states() ||
      policy.action_counts() != game.action_counts())
    throw lincce::ConfigError("policy shape does not match the game");
  const auto report = lincce::cce_gap(game, policy);
  spdlog::info("max_gap={:.6f}", report.max_gap);
  lincce::write_json_file(out_path, lincce::gap_report_to_json(report));
  return 0;
}

struct GenOptions {
  std::string kind;
  int states = 4;
  int agents = 2;
  std::vector<int> actions;
  int horizon = 3;
  std::uint64_t seed = 0;
  std::string payoffs;
};

int cmd_gen(const GenOptions& o, const std::string& out_path) {
  using lincce::json;
  json generator = {{"generator", o.kind}};
  if (o.kind == "random_tabular") {
    generator["S"] = o.states;
    generator["H"] = o.horizon;
    generator["seed"] = o.seed;
    if (o.actions.size() > 1) {
      generator["A"] = o.actions;
    } else {
      generator["A"] = o.actions.empty() ? 2 : o.actions[0];
      generator["m"] = o.agents;
    }
  } else if (o.kind == "chain") {
    generator["S"] = o.states;
    generator["H"] = o.horizon;
    generator["m"] = o.agents;
    generator["A"] = o.actions.empty() ? 1 : o.actions[0];
  } else if (o.kind == "matrix_game") {
    std::vector<std::vector<double>> payoffs;
    std::string rows = o.payoffs;
    std::replace(rows.begin(), rows.end(), '/', ';');
    std::stringstream ss(rows);
    std::string row;
    while (std::getline(ss, row, ';')) payoffs.push_back(parse_list(row));
    generator["payoffs"] = payoffs;
    generator["A"] = o.actions;
    generator["H"] = o.horizon;
  } else {
    generator["H"] = o.horizon;
  }
  lincce::ExperimentConfig config;
  config.game = generator;
  const auto game = lincce::build_game(config);
  lincce::write_json_file(out_path, lincce::game_to_json(game));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Equilibrium learning in Markov games with linear features"};
  app.require_subcommand(1);

  std::string config_path, out_path, game_path, policy_path, param, values,
      summary_path;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run one seeded experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--seed", seed, "Run seed")->required();
  run->add_option("--out", out_path, "Output CSV")->required();

  auto* sw = app.add_subcommand("sweep", "Grid sweep over one parameter");
  sw->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sw->add_option("--param", param, "K, N, tau, lambda or seeds")->required();
  sw->add_option("--values", values, "Comma-separated values")->required();
  sw->add_option("--out", out_path, "Output CSV")->required();
  sw->add_option("--summary", summary_path, "Per-value summary CSV");

  auto* oracle = app.add_subcommand("oracle", "Exact CCE gap of a policy");
  oracle->add_option("--game", game_path, "Game (JSON)")->required();
  oracle->add_option("--policy", policy_path, "Policy (JSON)")->required();
  oracle->add_option("--out", out_path, "Gap report (JSON)")->required();

  GenOptions gen_opts;
  auto* gen = app.add_subcommand("gen", "Write a generated game as JSON");
  gen->add_option("--kind", gen_opts.kind,
                  "random_tabular, matrix_game, chain, matching_pennies or "
                  "prisoners_dilemma")
      ->required();
  gen->add_option("--out", out_path, "Output game (JSON)")->required();
  gen->add_option("--states", gen_opts.states, "Number of states");
  gen->add_option("--agents", gen_opts.agents, "Number of agents");
  gen->add_option("--actions", gen_opts.actions, "Actions per agent")->delimiter(',');
  gen->add_option("--horizon", gen_opts.horizon, "Horizon");
  gen->add_option("--seed", gen_opts.seed, "Generator seed");
  gen->add_option("--payoffs", gen_opts.payoffs,
                  "Matrix payoffs: agents separated by ';' or '/', joint actions by ','");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, out_path);
    if (*sw) return cmd_sweep(config_path, param, values, out_path, summary_path);
    if (*oracle) return cmd_oracle(game_path, policy_path, out_path);
    if (*gen) return cmd_gen(gen_opts, out_path);
  } catch (const lincce::ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfigError;
  } catch (const lincce::InvariantViolation& e) {
    spdlog::error("invariant violation: {}", e.what());
    return kInvariantViolation;
  } catch (const lincce::RestartBudgetExceeded& e) {
    spdlog::error("invariant violation: {}", e.what());
    return kInvariantViolation;
  } catch (const lincce::ProtocolViolation& e) {
    spdlog::error("invariant violation: {}", e.what());
    return kInvariantViolation;
  } catch (const lincce::DimensionError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfigError;
  }
  return 0;
}
