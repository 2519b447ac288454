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

#include "swarmlab/reputation.h"

#include <algorithm>
#include <ostream>

#include "swarmlab/errors.h"
#include "swarmlab/text.h"

namespace swarmlab::reputation {

namespace {

double clamp_to(double v, const ReputationParams& p) { return std::clamp(v, p.r_min, p.r_max); }

double combine(double ranking, double generation, const ReputationParams& p) {
  return p.alpha * ranking + (1.0 - p.alpha) * generation;
}

// Moves both channels by the same amount so combined reaches target; when one
// channel saturates the other absorbs the remainder.
ReputationState shift_combined(const ReputationState& s, double target, const ReputationParams& p) {
  const double delta = target - s.combined;
  double r = clamp_to(s.ranking + delta, p);
  double g = clamp_to(s.generation + delta, p);
  const bool r_saturated = r != s.ranking + delta;
  const bool g_saturated = g != s.generation + delta;
  if (p.alpha >= 1.0) {
    r = clamp_to(target, p);
  } else if (p.alpha <= 0.0) {
    g = clamp_to(target, p);
  } else if (r_saturated && !g_saturated) {
    g = clamp_to((target - p.alpha * r) / (1.0 - p.alpha), p);
  } else if (g_saturated && !r_saturated) {
    r = clamp_to((target - (1.0 - p.alpha) * g) / p.alpha, p);
  }
  return with_channels(r, g, p, s.last_active_round);
}

}  // namespace

void ReputationParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("reputation.") + what);
  };
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must be in [0,1]");
  require(beta >= 0.0 && beta <= 1.0, "beta must be in [0,1]");
  require(delta_up > 0.0, "delta_up must be > 0");
  require(delta_down > 0.0, "delta_down must be > 0");
  require(decay_delta >= 0.0 && decay_delta < 1.0, "decay_delta must be in [0,1)");
  require(r_min < r_max, "r_min must be < r_max");
  require(slash_threshold > r_min && slash_threshold < r_max, "slash_threshold must lie in (r_min, r_max)");
  require(r_initial >= slash_threshold && r_initial <= r_max, "r_initial must lie in [slash_threshold, r_max]");
}

ReputationState ReputationState::initial(const ReputationParams& params) {
  return with_channels(params.r_initial, params.r_initial, params);
}

ReputationState with_channels(double ranking, double generation, const ReputationParams& params,
                              std::int64_t last_active_round) {
  ReputationState s;
  s.ranking = ranking;
  s.generation = generation;
  s.combined = combine(ranking, generation, params);
  s.last_active_round = last_active_round;
  return s;
}

ReputationState update_ranking_ema(const ReputationState& state, double agreement_fraction,
                                   const ReputationParams& params, double round_weight) {
  const double retain = 1.0 - round_weight * (1.0 - params.beta);
  const double r = clamp_to(retain * state.ranking + (1.0 - retain) * agreement_fraction, params);
  return with_channels(r, state.generation, params, state.last_active_round);
}

ReputationState update_ranking_ema(const ReputationState& state, std::span<const bool> agreements,
                                   const ReputationParams& params, double round_weight) {
  if (agreements.empty()) return state;
  const auto agree = std::count(agreements.begin(), agreements.end(), true);
  return update_ranking_ema(state, static_cast<double>(agree) / static_cast<double>(agreements.size()), params,
                            round_weight);
}

ReputationState update_generation_ema(const ReputationState& state, bool won_round, const ReputationParams& params,
                                      double round_weight) {
  const double retain = 1.0 - round_weight * (1.0 - params.beta);
  const double g = clamp_to(retain * state.generation + (1.0 - retain) * (won_round ? 1.0 : 0.0), params);
  return with_channels(state.ranking, g, params, state.last_active_round);
}

ReputationState apply_round_transition(const ReputationState& state, std::optional<double> performance,
                                       const ReputationParams& params) {
  if (!performance) {
    const double keep = 1.0 - params.decay_delta;
    return with_channels(clamp_to(state.ranking * keep, params), clamp_to(state.generation * keep, params), params,
                         state.last_active_round);
  }
  if (*performance > params.perf_threshold) {
    return shift_combined(state, std::min(params.r_max, state.combined + params.delta_up), params);
  }
  if (*performance < params.perf_threshold) {
    return shift_combined(state, std::max(params.r_min, state.combined - params.delta_down), params);
  }
  return state;
}

SlashOutcome check_slash(const ReputationState& state, const ReputationParams& params) {
  if (state.combined < params.slash_threshold) {
    ReputationState zero;
    zero.ranking = zero.generation = zero.combined = 0.0;
    zero.last_active_round = state.last_active_round;
    return {zero, true};
  }
  return {state, false};
}

Digest reputation_commitment(std::span<const NodeRoundRecord> history, std::span<const std::uint8_t> pubkey) {
  Sha256 h;
  h.update("swarmlab/reputation-history/v1");
  h.update_u64(history.size());
  for (const auto& rec : history) {
    const std::uint8_t won = rec.won ? 1 : 0;
    const std::uint8_t slashed = rec.slashed ? 1 : 0;
    h.update_u64(static_cast<std::uint64_t>(rec.round));
    h.update(std::span(&won, 1));
    h.update_f64(rec.agreement);
    h.update_f64(rec.combined);
    h.update(std::span(&slashed, 1));
  }
  h.update(pubkey);
  return h.finish();
}

Digest reputation_commitment(std::span<const NodeRoundRecord> history, std::string_view pubkey) {
  return reputation_commitment(history,
                               std::span(reinterpret_cast<const std::uint8_t*>(pubkey.data()), pubkey.size()));
}

void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRow> rows) {
  out << "round,node_id,ranking,generation,combined,slashed\n";
  for (const auto& row : rows) {
    out << row.round << ',' << row.node_id << ',' << format_double(row.state.ranking) << ','
        << format_double(row.state.generation) << ',' << format_double(row.state.combined) << ','
        << (row.slashed ? 1 : 0) << '\n';
  }
}

}  // namespace swarmlab::reputation
