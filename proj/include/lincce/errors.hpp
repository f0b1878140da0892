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

#ifndef LINCCE_ERRORS_HPP
#define LINCCE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lincce {

/// Bad shapes, out-of-range indices and malformed inputs.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment configuration could not be validated.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by the simulator when a query breaks the access protocol. The
/// query is refused and counted in the ledger before this is thrown.
class ProtocolViolation : public std::runtime_error {
 public:
  ProtocolViolation(std::string protocol, int step, int state)
      : std::runtime_error("protocol violation (" + protocol +
                           "): step=" + std::to_string(step) +
                           " state=" + std::to_string(state)),
        protocol_(std::move(protocol)),
        step_(step),
        state_(state) {}

  const std::string& protocol() const noexcept { return protocol_; }
  int step() const noexcept { return step_; }
  int state() const noexcept { return state_; }

 private:
  std::string protocol_;
  int step_;
  int state_;
};

/// The local-access learner restarted more often than the core-set size bound
/// allows; this indicates a bug in the coverage bookkeeping.
class RestartBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A checked run-level invariant failed (ledger mismatch, protocol
/// violations in a learner run).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace lincce

#endif  // LINCCE_ERRORS_HPP
