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

#ifndef LINCCE_SIMULATOR_HPP
#define LINCCE_SIMULATOR_HPP

#include <array>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lincce/errors.hpp"
#include "lincce/game.hpp"
#include "lincce/random.hpp"

namespace lincce {

enum class AccessProtocol { kRandomAccess, kLocalAccess, kOnlineAccess };

inline std::string to_string(AccessProtocol p) {
  switch (p) {
    case AccessProtocol::kRandomAccess: return "random_access";
    case AccessProtocol::kLocalAccess: return "local_access";
    case AccessProtocol::kOnlineAccess: return "online_access";
  }
  return "unknown";
}

/// Accounting bucket a query is charged to.
enum class Phase { kInit, kLearn, kRollout, kSingleAgent, kFinalRollout, kOther };
inline constexpr int kNumPhases = 6;

inline std::string to_string(Phase p) {
  static constexpr std::array<const char*, kNumPhases> names = {
      "init", "learn", "rollout", "single_agent", "final_rollout", "other"};
  return names[static_cast<int>(p)];
}

struct LedgerEntry {
  std::int64_t query_index = 0;
  Phase phase = Phase::kOther;
  int step = 0;
  int state = 0;
  int joint_action = 0;
  int next_state = -1;
  bool protocol_ok = true;
};

struct SampleLedger {
  std::int64_t total_queries = 0;
  std::array<std::int64_t, kNumPhases> per_phase{};
  std::vector<char> visited;
  std::int64_t violation_count = 0;
  /// Only filled when recording is enabled.
  std::vector<LedgerEntry> entries;

  std::int64_t phase_count(Phase p) const {
    return per_phase[static_cast<int>(p)];
  }
  std::int64_t num_visited() const {
    std::int64_t n = 0;
    for (char v : visited) n += v;
    return n;
  }
};

/// CSV columns: query_index,phase,h,s,joint_a,s_next,protocol_ok
inline void write_ledger_csv(const SampleLedger& ledger, std::ostream& out) {
  out << "query_index,phase,h,s,joint_a,s_next,protocol_ok\n";
  for (const auto& e : ledger.entries) {
    out << e.query_index << ',' << to_string(e.phase) << ',' << e.step << ','
        << e.state << ',' << e.joint_action << ',' << e.next_state << ','
        << (e.protocol_ok ? 1 : 0) << '\n';
  }
}

struct QueryResult {
  std::vector<double> rewards;
  int next_state = 0;
};

/// Sampling interface to a MarkovGame under one access protocol. Every
/// served query draws s' from a counter-based stream keyed by
/// (seed, query index), so replays with the same seed and the same query
/// sequence are identical. The game must outlive the simulator.
class Simulator {
 public:
  Simulator(const MarkovGame& game, AccessProtocol protocol, std::uint64_t seed,
            bool record = false)
      : game_(&game),
        protocol_(protocol),
        seed_(seed),
        record_(record),
        cursor_(game.initial_state()) {
    ledger_.visited.assign(game.num_states(), 0);
    ledger_.visited[game.initial_state()] = 1;
  }

  const MarkovGame& game() const noexcept { return *game_; }
  AccessProtocol protocol() const noexcept { return protocol_; }
  const SampleLedger& ledger() const noexcept { return ledger_; }
  Phase phase() const noexcept { return phase_; }
  void set_phase(Phase phase) noexcept { phase_ = phase; }
  int cursor() const noexcept { return cursor_; }

  bool visited(int s) const {
    return s >= 0 && s < game_->num_states() && ledger_.visited[s] != 0;
  }

  /// Whether (h, s) may be queried right now.
  bool allowed(int h, int s) const {
    if (!game_->valid_step(h) || !game_->valid_state(s)) return false;
    switch (protocol_) {
      case AccessProtocol::kRandomAccess: return true;
      case AccessProtocol::kLocalAccess: return visited(s);
      case AccessProtocol::kOnlineAccess: return s == cursor_;
    }
    return false;
  }

  QueryResult query(int h, int s, int joint_action) {
    if (!allowed(h, s) || joint_action < 0 ||
        joint_action >= game_->num_joint_actions()) {
      ++ledger_.violation_count;
      if (record_)
        ledger_.entries.push_back({ledger_.total_queries, phase_, h, s,
                                   joint_action, -1, false});
      throw ProtocolViolation(to_string(protocol_), h, s);
    }
    const std::int64_t index = ledger_.total_queries++;
    ++ledger_.per_phase[static_cast<int>(phase_)];
    QueryResult result;
    result.next_state =
        sample_index(game_->transition(h, s, joint_action),
                     keyed_uniform(seed_, static_cast<std::uint64_t>(index)));
    result.rewards.resize(game_->num_agents());
    for (int i = 0; i < game_->num_agents(); ++i)
      result.rewards[i] = game_->reward(h, i, s, joint_action);
    ledger_.visited[result.next_state] = 1;
    cursor_ = result.next_state;
    if (record_)
      ledger_.entries.push_back({index, phase_, h, s, joint_action,
                                 result.next_state, true});
    return result;
  }

  /// Online access only: moves the cursor back to s_1. Not a sample.
  int reset_cursor() {
    if (protocol_ != AccessProtocol::kOnlineAccess)
      throw ProtocolViolation(to_string(protocol_) + " has no reset", -1,
                              game_->initial_state());
    cursor_ = game_->initial_state();
    return cursor_;
  }

 private:
  const MarkovGame* game_;
  AccessProtocol protocol_;
  std::uint64_t seed_;
  bool record_;
  int cursor_;
  Phase phase_ = Phase::kOther;
  SampleLedger ledger_;
};

/// Fills the actions of every agent except `agent` at (h, s).
template <typename T>
concept OpponentSampler = requires(const T& t, int h, int s, int agent,
                                   Rng& rng, std::span<int> actions) {
  { t.sample(h, s, agent, rng, actions) } -> std::same_as<void>;
};

/// Opponents act independently from fixed per-agent distributions (entries
/// for the learning agent are ignored).
struct ProductOpponents {
  std::vector<std::vector<double>> dists;

  void sample(int, int, int agent, Rng& rng, std::span<int> actions) const {
    for (std::size_t j = 0; j < dists.size(); ++j)
      if (static_cast<int>(j) != agent)
        actions[j] = sample_index(dists[j], rng.uniform());
  }
};

/// Opponents follow a step mixture: draw k by the weights at h, then
/// a_j ~ pi^k_{h,j}(.|s) for every j != agent.
struct MixtureOpponents {
  const StepMixturePolicy* mix = nullptr;

  void sample(int h, int s, int agent, Rng& rng, std::span<int> actions) const {
    const int k = sample_index(mix->weights(h), rng.uniform());
    for (int j = 0; j < mix->num_agents(); ++j)
      if (j != agent) actions[j] = sample_index(mix->probs(h, k, j, s), rng.uniform());
  }
};

struct LocalSample {
  double reward = 0.0;
  int next_state = 0;
};

/// Draws a_{-i} from the opponents, then spends one simulator query on the
/// joint action (a, a_{-i}). Returns agent i's reward and s'.
template <OpponentSampler Opponents>
LocalSample local_sampling(Simulator& sim, int h, int agent, int s, int action,
                           const Opponents& opponents, Rng& rng) {
  std::vector<int> actions(sim.game().num_agents(), 0);
  opponents.sample(h, s, agent, rng, actions);
  actions[agent] = action;
  const auto result = sim.query(h, s, sim.game().joint_space().encode(actions));
  return {result.rewards[agent], result.next_state};
}

}  // namespace lincce

#endif  // LINCCE_SIMULATOR_HPP
