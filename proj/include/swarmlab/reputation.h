// Copyright 2026 The Swarmlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swarmlab/hashing.h"

namespace swarmlab::reputation {

struct ReputationParams {
  double alpha = 0.5;  // ranking vs generation
  double beta = 0.9;   // EMA retention
  double delta_up = 0.02;
  double delta_down = 0.03;
  double decay_delta = 0.005;
  double r_min = 0.0;
  double r_max = 1.0;
  double slash_threshold = 0.1;
  double r_initial = 0.5;
  double perf_threshold = 0.5;

  void validate() const;
};

// Dual-channel reputation. combined == alpha * ranking + (1 - alpha) * generation
// after every update below.
struct ReputationState {
  double ranking = 0.5;
  double generation = 0.5;
  double combined = 0.5;
  std::int64_t last_active_round = -1;

  static ReputationState initial(const ReputationParams& params);
};

ReputationState with_channels(double ranking, double generation, const ReputationParams& params,
                              std::int64_t last_active_round = -1);

// EMA of the fraction of agreeing comparisons. round_weight scales the step
// (1 - beta); an empty agreement list leaves the state unchanged.
ReputationState update_ranking_ema(const ReputationState& state, std::span<const bool> agreements,
                                   const ReputationParams& params, double round_weight = 1.0);
ReputationState update_ranking_ema(const ReputationState& state, double agreement_fraction,
                                   const ReputationParams& params, double round_weight = 1.0);

ReputationState update_generation_ema(const ReputationState& state, bool won_round, const ReputationParams& params,
                                      double round_weight = 1.0);

// Per-round performance signal: agreement fraction plus one for a win.
inline double performance_signal(double agreement_fraction, bool won) { return agreement_fraction + (won ? 1.0 : 0.0); }

// Piecewise step on the combined score: +delta_up (capped at r_max) when
// performance > perf_threshold, -delta_down (floored at r_min) when below, and
// multiplication by (1 - decay_delta) when inactive (nullopt). Performance
// exactly at the threshold leaves the score unchanged. The change is carried
// by the channels so the combined identity keeps holding.
ReputationState apply_round_transition(const ReputationState& state, std::optional<double> performance,
                                       const ReputationParams& params);

struct SlashOutcome {
  ReputationState state;
  bool slashed = false;
};

// combined < slash_threshold zeroes all three values.
SlashOutcome check_slash(const ReputationState& state, const ReputationParams& params);

struct NodeRoundRecord {
  std::int64_t round = 0;
  bool won = false;
  double agreement = 0.0;
  double combined = 0.0;
  bool slashed = false;
};

// SHA-256(canonical(history) || pubkey). canonical() is the tag
// "swarmlab/reputation-history/v1", the record count as u64, then per record
// round (u64), won (1 byte), agreement and combined (IEEE-754 bits as u64),
// slashed (1 byte). Integers big-endian.
Digest reputation_commitment(std::span<const NodeRoundRecord> history, std::span<const std::uint8_t> pubkey);
Digest reputation_commitment(std::span<const NodeRoundRecord> history, std::string_view pubkey);

struct TrajectoryRow {
  std::int64_t round = 0;
  std::string node_id;
  ReputationState state;
  bool slashed = false;
};

// round,node_id,ranking,generation,combined,slashed
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows);

}  // namespace swarmlab::reputation
